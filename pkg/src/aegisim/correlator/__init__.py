from .alerts import (
    DEFAULT_MIN_ANCHORS,
    DEFAULT_RHO,
    DEFAULT_TAU_PERCENTILE,
    AlertGraph,
    Timeline,
    TimelineEntry,
    extract_alerts,
    prune,
    threshold_from_benign,
    timeline,
)
from .compress import DEFAULT_EPS, DEFAULT_WINDOW_MS, EventGroup, compress, ungroup
from .entities import EntityView, Template, classify_actor, classify_resource, view
from .export import alert_to_doc, alert_to_dot, timeline_from_doc, timeline_to_doc
from .graph import Edge, EventGraph, GraphError, Node, build_graph, topological_order
from .propagate import propagate
from .rarity import RarityModel, fit_rarity
from .rules import Rule, RuleSet, mine_rules

__all__ = [
    "DEFAULT_EPS",
    "DEFAULT_MIN_ANCHORS",
    "DEFAULT_RHO",
    "DEFAULT_TAU_PERCENTILE",
    "DEFAULT_WINDOW_MS",
    "AlertGraph",
    "Edge",
    "EntityView",
    "EventGraph",
    "EventGroup",
    "GraphError",
    "Node",
    "RarityModel",
    "Rule",
    "RuleSet",
    "Template",
    "TimelineEntry",
    "Timeline",
    "alert_to_doc",
    "alert_to_dot",
    "build_graph",
    "classify_actor",
    "classify_resource",
    "compress",
    "extract_alerts",
    "fit_rarity",
    "mine_rules",
    "propagate",
    "prune",
    "threshold_from_benign",
    "timeline",
    "timeline_from_doc",
    "timeline_to_doc",
    "topological_order",
    "ungroup",
    "view",
]
