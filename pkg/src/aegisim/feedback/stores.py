"""Verdict routing and the append-only feedback bases.

An alert is pending until the analyst rules it exactly once: true positives
escalate to the SOC queue, false positives land in the FP base (and their
events become reintroduction candidates once enough similar FPs pile up),
dangerous-but-authorized behaviour goes to the authorized-anomaly base,
which suppresses alerting but never feeds training.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..correlator import AlertGraph
from .signature import GraphSignature, signature, similarity

VERDICTS = ("true_positive", "false_positive", "authorized_anomaly")

DEFAULT_SIGMA = 0.8
DEFAULT_REINTRODUCE_AFTER = 3


class AnnotationError(ValueError):
    pass


@dataclass(frozen=True)
class Verdict:
    value: str
    note: str = ""

    def __post_init__(self):
        if self.value not in VERDICTS:
            raise AnnotationError(f"unknown verdict {self.value!r}")


@dataclass(frozen=True)
class BaseEntry:
    alert_id: str
    sig: GraphSignature
    verdict_ts: int
    note: str
    member_ids: tuple[str, ...] = ()


@dataclass
class SignatureBase:
    """Append-only store of ruled alerts (FP base / authorized base)."""

    name: str
    entries: list[BaseEntry] = field(default_factory=list)

    def append(self, entry: BaseEntry) -> None:
        if any(e.alert_id == entry.alert_id for e in self.entries):
            raise AnnotationError(f"{self.name}: duplicate entry for alert {entry.alert_id}")
        self.entries.append(entry)

    def best_match(self, sig: GraphSignature) -> tuple[str | None, float]:
        best_id, best = None, 0.0
        for e in self.entries:
            s = similarity(sig, e.sig)
            if s > best:
                best_id, best = e.alert_id, s
        return best_id, best


@dataclass(frozen=True)
class FilterOutcome:
    suppressed: bool
    matched_id: str | None
    matched_similarity: float


def filter_known(a: AlertGraph, fp_base: SignatureBase, sigma: float = DEFAULT_SIGMA,
                 authorized: SignatureBase | None = None) -> FilterOutcome:
    """Suppress an alert resembling a previously ruled one (never silently:
    the outcome carries the matched entry)."""
    sig = signature(a)
    best_id, best = fp_base.best_match(sig)
    if authorized is not None:
        auth_id, auth = authorized.best_match(sig)
        if auth > best:
            best_id, best = auth_id, auth
    if best >= sigma:
        return FilterOutcome(suppressed=True, matched_id=best_id, matched_similarity=best)
    return FilterOutcome(suppressed=False, matched_id=best_id, matched_similarity=best)


@dataclass
class RoutingOutcome:
    alert_id: str
    verdict: Verdict
    soc_queued: bool
    fp_base_size: int
    authorized_base_size: int
    reintroduction_candidates: tuple[str, ...]


@dataclass
class FeedbackStores:
    fp_base: SignatureBase = field(default_factory=lambda: SignatureBase("fp"))
    authorized_base: SignatureBase = field(default_factory=lambda: SignatureBase("authorized"))
    soc_queue: list[str] = field(default_factory=list)
    annotated: dict[str, str] = field(default_factory=dict)  # alert id -> verdict
    reintroduce_after: int = DEFAULT_REINTRODUCE_AFTER

    def annotate(self, a: AlertGraph, v: Verdict, ts: int | None = None) -> RoutingOutcome:
        """Route one verdict; an alert transitions out of pending exactly once."""
        if a.alert_id in self.annotated:
            raise AnnotationError(f"alert {a.alert_id} already annotated")
        ts = a.created_ts if ts is None else ts
        candidates: tuple[str, ...] = ()
        if v.value == "true_positive":
            self.soc_queue.append(a.alert_id)
        elif v.value == "false_positive":
            sig = signature(a)
            entry = BaseEntry(a.alert_id, sig, ts, v.note, tuple(a.member_event_ids))
            self.fp_base.append(entry)
            candidates = self._reintroduction(sig)
        else:
            self.authorized_base.append(BaseEntry(a.alert_id, signature(a), ts, v.note))
        self.annotated[a.alert_id] = v.value
        return RoutingOutcome(
            alert_id=a.alert_id,
            verdict=v,
            soc_queued=v.value == "true_positive",
            fp_base_size=len(self.fp_base.entries),
            authorized_base_size=len(self.authorized_base.entries),
            reintroduction_candidates=candidates,
        )

    def _reintroduction(self, sig: GraphSignature) -> tuple[str, ...]:
        """Once similar FPs pile up, their member events may re-enter training."""
        similar = [e for e in self.fp_base.entries if similarity(sig, e.sig) >= DEFAULT_SIGMA]
        if len(similar) < self.reintroduce_after:
            return ()
        out: list[str] = []
        for e in similar:
            out.extend(e.member_ids)
        return tuple(out)
