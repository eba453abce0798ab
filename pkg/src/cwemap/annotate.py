"""Human-in-the-loop annotation workflow.

Records are partitioned across exactly three annotators with no overlap;
the partition is rotated for a second review round. Two agreeing decisions
finalize a record; disagreement routes it to the remaining annotator for
adjudication. Two unmappable decisions exclude the record. Every decision
is journaled before it mutates state, and decisions made with a model
ranking attached also append to a hash-chained feedback log.
"""

from __future__ import annotations

import hashlib
import json
import logging
import threading
import time
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .corpus import Catalog, CveRecord, DatasetRow, LabelAssignment, format_label, parse_label
from .errors import StaleVersionError, WorkflowError, WrongActorError
from .rank import RankedList

logger = logging.getLogger(__name__)


class TaskStatus(str, Enum):
    PENDING_R1 = "pending_r1"
    PENDING_R2 = "pending_r2"
    FINAL = "final"
    # reserved wire value: disagreement routes straight to adjudication, so
    # the engine never parks a task here
    CONFLICT = "conflict"
    PENDING_ADJUDICATION = "pending_adjudication"
    EXCLUDED = "excluded"


class DecisionAction(str, Enum):
    AGREE = "agree"
    RELABEL = "relabel"
    CAUSAL = "causal"
    UNMAPPABLE = "unmappable"


class InvalidDecisionError(WorkflowError):
    pass


@dataclass(frozen=True)
class Decision:
    annotator: str
    action: DecisionAction
    labels: LabelAssignment | None = None
    timestamp: float = field(default_factory=time.time)

    def __post_init__(self):
        if self.action == DecisionAction.RELABEL:
            if self.labels is None or not self.labels.is_single:
                raise InvalidDecisionError("relabel requires a single label")
        elif self.action == DecisionAction.CAUSAL:
            if self.labels is None or self.labels.is_single:
                raise InvalidDecisionError("causal requires a chain of two or more labels")
        elif self.labels is not None:
            raise InvalidDecisionError(f"{self.action.value} must not carry labels")


@dataclass(frozen=True)
class RoundResult:
    annotator: str
    action: DecisionAction
    labels: LabelAssignment | None  # effective labels; None means unmappable
    timestamp: float


@dataclass
class AnnotationTask:
    cve_id: str
    title: str
    description: str
    nvd_labels: frozenset[str]
    annotators: tuple[str, str, str]  # (round-1, round-2, adjudicator)
    model_ranking: RankedList | None = None
    round1: RoundResult | None = None
    round2: RoundResult | None = None
    adjudication: RoundResult | None = None
    status: TaskStatus = TaskStatus.PENDING_R1
    version: int = 0

    @property
    def expected_actor(self) -> str | None:
        if self.status == TaskStatus.PENDING_R1:
            return self.annotators[0]
        if self.status == TaskStatus.PENDING_R2:
            return self.annotators[1]
        if self.status == TaskStatus.PENDING_ADJUDICATION:
            return self.annotators[2]
        return None

    @property
    def final_labels(self) -> LabelAssignment | None:
        if self.status != TaskStatus.FINAL:
            return None
        if self.adjudication is not None:
            return self.adjudication.labels
        return self.round2.labels if self.round2 else None

    def to_payload(self) -> dict:
        def round_payload(r: RoundResult | None):
            if r is None:
                return None
            return {
                "annotator": r.annotator,
                "action": r.action.value,
                "labels": format_label(r.labels) if r.labels else None,
            }

        return {
            "cve_id": self.cve_id,
            "title": self.title,
            "description": self.description,
            "nvd_labels": sorted(self.nvd_labels),
            "status": self.status.value,
            "version": self.version,
            "expected_annotator": self.expected_actor,
            "round1": round_payload(self.round1),
            "round2": round_payload(self.round2),
            "adjudication": round_payload(self.adjudication),
            "model_ranking": (
                [[r, s] for r, s in self.model_ranking.entries]
                if self.model_ranking is not None else None),
        }


def assign(cve_ids: Sequence[str], annotators: Sequence[str]) -> dict[str, tuple[str, str, str]]:
    """Partition ids across exactly three annotators, round-robin by sorted
    cve_id; the round-2 reviewer is the next annotator cyclically and the
    remaining one adjudicates."""
    if len(annotators) != 3:
        raise WorkflowError(f"exactly 3 annotators required, got {len(annotators)}")
    if len(set(annotators)) != 3:
        raise WorkflowError("annotators must be distinct")
    ids = sorted(cve_ids)
    if len(set(ids)) != len(ids):
        raise WorkflowError("duplicate cve_ids in assignment")
    if not ids:
        raise WorkflowError("nothing to assign")
    out = {}
    for i, cve_id in enumerate(ids):
        a1 = annotators[i % 3]
        a2 = annotators[(i + 1) % 3]
        a3 = annotators[(i + 2) % 3]
        out[cve_id] = (a1, a2, a3)
    return out


class FeedbackLog:
    """Append-only, hash-chained log of (shown ranking, human decision)."""

    GENESIS = "0" * 64

    def __init__(self, path: str | Path):
        self.path = Path(path)
        self._last = self.GENESIS
        if self.path.exists():
            for line in self.path.read_text("utf-8").splitlines():
                if line.strip():
                    self._last = json.loads(line)["hash"]

    @staticmethod
    def _digest(prev: str, payload: dict) -> str:
        raw = prev + json.dumps(payload, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(raw.encode("utf-8")).hexdigest()

    def append(self, cve_id: str, ranking: RankedList, labels: LabelAssignment | None,
               timestamp: float) -> dict:
        payload = {
            "cve_id": cve_id,
            "ranking": [[r, s] for r, s in ranking.entries],
            "labels": format_label(labels) if labels else None,
            "accepted_top1": bool(labels and labels.chain[0] == ranking.entries[0][0]),
            "ts": timestamp,
        }
        event = dict(payload, prev=self._last, hash=self._digest(self._last, payload))
        with self.path.open("a", encoding="utf-8") as f:
            f.write(json.dumps(event, sort_keys=True, separators=(",", ":")) + "\n")
        self._last = event["hash"]
        return event

    @classmethod
    def verify(cls, path: str | Path) -> int:
        """Recompute the chain; returns the event count, raises on tampering."""
        prev = cls.GENESIS
        count = 0
        for lineno, line in enumerate(Path(path).read_text("utf-8").splitlines(), start=1):
            if not line.strip():
                continue
            event = json.loads(line)
            payload = {k: v for k, v in event.items() if k not in ("prev", "hash")}
            if event["prev"] != prev:
                raise WorkflowError(f"feedback log broken at line {lineno}: prev mismatch")
            if event["hash"] != cls._digest(prev, payload):
                raise WorkflowError(f"feedback log broken at line {lineno}: hash mismatch")
            prev = event["hash"]
            count += 1
        return count


class Workflow:
    """State machine over AnnotationTasks with journaling and an HTTP-friendly
    surface (everything the API serves comes from here)."""

    def __init__(self, annotators: Sequence[str], catalog: Catalog,
                 journal_path: str | Path | None = None,
                 feedback_path: str | Path | None = None):
        if len(annotators) != 3 or len(set(annotators)) != 3:
            raise WorkflowError("exactly 3 distinct annotators required")
        self.annotators = tuple(annotators)
        self.catalog = catalog
        self.tasks: dict[str, AnnotationTask] = {}
        self._lock = threading.Lock()
        self._journal_path = Path(journal_path) if journal_path else None
        self._feedback = FeedbackLog(feedback_path) if feedback_path else None
        self._replaying = False

    # -- task intake --------------------------------------------------------

    def add_records(self, records: Iterable[CveRecord],
                    rankings: Mapping[str, RankedList] | None = None,
                    nvd_labels: Mapping[str, frozenset[str]] | None = None) -> None:
        records = list(records)
        assignment = assign([r.cve_id for r in records], self.annotators)
        with self._lock:
            for rec in records:
                if rec.cve_id in self.tasks:
                    raise WorkflowError(f"task {rec.cve_id} already registered")
                labels = rec.nvd_labels
                if nvd_labels is not None and rec.cve_id in nvd_labels:
                    labels = frozenset(nvd_labels[rec.cve_id])
                self.tasks[rec.cve_id] = AnnotationTask(
                    cve_id=rec.cve_id, title=rec.title, description=rec.description,
                    nvd_labels=labels, annotators=assignment[rec.cve_id],
                    model_ranking=rankings.get(rec.cve_id) if rankings else None)

    # -- decision handling --------------------------------------------------

    def _effective_labels(self, task: AnnotationTask, decision: Decision) -> LabelAssignment | None:
        if decision.action in (DecisionAction.RELABEL, DecisionAction.CAUSAL):
            return decision.labels
        if decision.action == DecisionAction.UNMAPPABLE:
            return None
        # agree: inherit the prior label (round-1's, or NVD's in round 1)
        if task.status == TaskStatus.PENDING_R2:
            if task.round1 is None or task.round1.labels is None:
                raise InvalidDecisionError(
                    "agree has no prior label to inherit (round 1 was unmappable)")
            return task.round1.labels
        if task.status == TaskStatus.PENDING_R1:
            in_top25 = sorted(l for l in task.nvd_labels if l in self.catalog)
            if len(in_top25) != 1:
                raise InvalidDecisionError(
                    f"agree requires exactly one Top-25 NVD label, task has {in_top25}")
            return LabelAssignment((self.catalog.rank_of(in_top25[0]),))
        raise InvalidDecisionError("adjudication must state labels explicitly")

    def submit(self, cve_id: str, decision: Decision,
               task_version: int | None = None) -> AnnotationTask:
        with self._lock:
            task = self.tasks.get(cve_id)
            if task is None:
                raise WorkflowError(f"unknown task {cve_id}")
            if task.status in (TaskStatus.FINAL, TaskStatus.EXCLUDED):
                raise InvalidDecisionError(f"task {cve_id} is already {task.status.value}")
            if task_version is not None and task_version != task.version:
                raise StaleVersionError(
                    f"task {cve_id} is at version {task.version}, decision used {task_version}")
            expected = task.expected_actor
            if decision.annotator != expected:
                raise WrongActorError(
                    f"task {cve_id} awaits {expected}, not {decision.annotator}")

            labels = self._effective_labels(task, decision)
            self._journal(task, decision)
            result = RoundResult(decision.annotator, decision.action, labels,
                                 decision.timestamp)
            if task.status == TaskStatus.PENDING_R1:
                task.round1 = result
                task.status = TaskStatus.PENDING_R2
            elif task.status == TaskStatus.PENDING_R2:
                task.round2 = result
                r1 = task.round1.labels
                if r1 is None and labels is None:
                    task.status = TaskStatus.EXCLUDED
                elif r1 == labels:
                    task.status = TaskStatus.FINAL
                else:
                    task.status = TaskStatus.PENDING_ADJUDICATION
            else:  # PENDING_ADJUDICATION; the adjudicator's word is final
                task.adjudication = result
                task.status = TaskStatus.EXCLUDED if labels is None else TaskStatus.FINAL
            task.version += 1

            if self._feedback is not None and task.model_ranking is not None \
                    and not self._replaying:
                self._feedback.append(cve_id, task.model_ranking, labels,
                                      decision.timestamp)
            return task

    # -- journal ------------------------------------------------------------

    def _journal(self, task: AnnotationTask, decision: Decision) -> None:
        if self._journal_path is None or self._replaying:
            return
        event = {
            "cve_id": task.cve_id,
            "annotator": decision.annotator,
            "action": decision.action.value,
            "labels": format_label(decision.labels) if decision.labels else None,
            "ts": decision.timestamp,
            "version": task.version,
        }
        with self._journal_path.open("a", encoding="utf-8") as f:
            f.write(json.dumps(event, sort_keys=True, separators=(",", ":")) + "\n")

    def replay_journal(self, path: str | Path | None = None) -> int:
        """Re-apply journaled decisions after a restart; tasks must already
        be registered (registration is deterministic from the same inputs)."""
        path = Path(path) if path else self._journal_path
        if path is None or not path.exists():
            return 0
        self._replaying = True
        count = 0
        try:
            for line in path.read_text("utf-8").splitlines():
                if not line.strip():
                    continue
                e = json.loads(line)
                decision = Decision(
                    annotator=e["annotator"], action=DecisionAction(e["action"]),
                    labels=parse_label(e["labels"]) if e.get("labels") else None,
                    timestamp=e["ts"])
                self.submit(e["cve_id"], decision, task_version=e["version"])
                count += 1
        finally:
            self._replaying = False
        return count

    # -- queries ------------------------------------------------------------

    def next_task(self, annotator: str) -> AnnotationTask | None:
        if annotator not in self.annotators:
            raise WorkflowError(f"unknown annotator {annotator!r}")
        with self._lock:
            pending = [t for t in self.tasks.values() if t.expected_actor == annotator]
            if not pending:
                return None
            return min(pending, key=lambda t: t.cve_id)

    def export_final(self) -> list[DatasetRow]:
        with self._lock:
            return export_final(self.tasks.values())

    def stats(self) -> dict:
        from .corpus import dataset_stats

        with self._lock:
            rows = export_final(self.tasks.values())
            ds = dataset_stats(rows)
            pending = {a: 0 for a in self.annotators}
            adjudication = 0
            for t in self.tasks.values():
                actor = t.expected_actor
                if actor is not None:
                    pending[actor] += 1
                if t.status == TaskStatus.PENDING_ADJUDICATION:
                    adjudication += 1
            nvd = {t.cve_id: t.nvd_labels for t in self.tasks.values()}
        agreement = agreement_with_nvd(rows, nvd, self.catalog) if rows else None
        return {
            "total": ds.total,
            "single": ds.single_count,
            "causal": ds.causal_count,
            "per_label_counts": {str(k): v for k, v in ds.per_label_counts.items()},
            "pending": pending,
            "adjudication_queue": adjudication,
            "agreement_with_nvd": agreement,
        }


def export_final(tasks: Iterable[AnnotationTask]) -> list[DatasetRow]:
    """Final tasks as dataset rows in deterministic cve_id order; pending
    and excluded tasks are omitted."""
    rows = []
    for t in sorted(tasks, key=lambda t: t.cve_id):
        if t.status == TaskStatus.FINAL:
            labels = t.final_labels
            if labels is None:
                raise WorkflowError(f"final task {t.cve_id} has no labels")
            rows.append(DatasetRow(t.cve_id, labels))
    return rows


def agreement_with_nvd(rows: Sequence[DatasetRow],
                       nvd_labels: Mapping[str, frozenset[str]],
                       catalog: Catalog) -> float:
    """Fraction of final rows whose labels are contained in the NVD set.

    Single-label rows agree when their CWE id is in the set; causal rows
    agree only when every chain element's id is.
    """
    if not rows:
        return 0.0
    agreeing = 0
    for row in rows:
        nvd = nvd_labels.get(row.cve_id, frozenset())
        ids = row.assignment.cwe_ids(catalog)
        if all(i in nvd for i in ids):
            agreeing += 1
    return agreeing / len(rows)
