"""aegisim: a behavioural-analytics defense pipeline pitted against a
reinforcement-learning red team on a simulated information system."""

__version__ = "0.1.0"
