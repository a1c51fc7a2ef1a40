"""Task and project domain model plus delimited-text dataset ingestion.

Dates are stored as integer day offsets from the catalog epoch (the earliest
date appearing anywhere in the file); every downstream computation is
day-granular.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from datetime import date, timedelta
from pathlib import Path
from typing import Iterable, Sequence, TextIO

from .errors import CycleError, SchemaError, UnknownTaskError

STATUS_COMPLETED = "completed"
STATUS_FAILED = "failed"

# Canonical dataset column names, keyed by Task attribute.
COLUMNS = {
    "task_id": "Task ID",
    "registration_start": "Task Registration Start Date",
    "registration_end": "Task Registration End Date",
    "submission_end": "Task Submission End Date",
    "prize": "Monetary Prize",
    "total_prize": "Total Monetary Prize",
    "task_type": "Task Type",
    "technologies": "Technology",
    "platforms": "Platforms",
    "requirement_text": "Task Requirements",
    "status": "Task Status",
    "registrations": "# Registration",
    "submissions": "# Submissions",
    "valid_submissions": "# Valid Submissions",
}

OPTIONAL_ATTRS = ("total_prize",)
REQUIRED_COLUMNS = tuple(v for k, v in COLUMNS.items() if k not in OPTIONAL_ATTRS)

LIST_SEPARATOR = ";"


@dataclass(frozen=True)
class Task:
    """One crowdsourced task.

    Date fields are day indices relative to the owning catalog's epoch.
    ``total_prize`` is the winner-plus-runner-up sum when the dataset carries
    it; it defaults to ``prize``.
    """

    task_id: str
    registration_start: int
    registration_end: int
    submission_end: int
    prize: float
    task_type: str
    technologies: frozenset[str]
    platforms: frozenset[str]
    requirement_text: str
    registrations: int
    submissions: int
    valid_submissions: int
    status: str
    total_prize: float = -1.0

    def __post_init__(self):
        if self.total_prize < 0:
            object.__setattr__(self, "total_prize", self.prize)
        if not (self.registration_start <= self.registration_end <= self.submission_end):
            raise ValueError(
                "dates out of order: registration start <= registration end "
                "<= submission end required"
            )
        if self.prize < 0:
            raise ValueError("prize must be nonnegative")
        if not (0 <= self.valid_submissions <= self.submissions <= self.registrations):
            raise ValueError("need 0 <= valid submissions <= submissions <= registrations")
        if self.status not in (STATUS_COMPLETED, STATUS_FAILED):
            raise ValueError(f"status must be '{STATUS_COMPLETED}' or '{STATUS_FAILED}'")

    @property
    def duration(self) -> int:
        """Total days from registration start to submission end."""
        return self.submission_end - self.registration_start

    @property
    def registration_window(self) -> int:
        """Length of the registration window in days, at least 1."""
        return max(1, self.registration_end - self.registration_start)


@dataclass(frozen=True)
class CorpusNorms:
    """Corpus-level maxima used as normalization denominators."""

    prize_max: float = 0.0
    reg_date_max: int = 0
    sub_date_max: int = 0
    tech_count_max: int = 0


def _compute_norms(tasks: Sequence[Task]) -> CorpusNorms:
    if len(tasks) < 1:
        return CorpusNorms()
    prizes = [t.prize for t in tasks]
    regs = [t.registration_start for t in tasks]
    subs = [t.submission_end for t in tasks]
    return CorpusNorms(
        prize_max=max(prizes) - min(prizes),
        reg_date_max=max(regs) - min(regs),
        sub_date_max=max(subs) - min(subs),
        tech_count_max=max(len(t.technologies) for t in tasks),
    )


@dataclass(frozen=True)
class TaskCatalog:
    """An immutable collection of tasks plus the corpus normalization maxima."""

    tasks: tuple[Task, ...]
    epoch: date | None
    norms: CorpusNorms

    @classmethod
    def from_tasks(cls, tasks: Iterable[Task], epoch: date | None = None) -> "TaskCatalog":
        tasks = tuple(tasks)
        return cls(tasks=tasks, epoch=epoch, norms=_compute_norms(tasks))

    def __len__(self) -> int:
        return len(self.tasks)

    def get(self, task_id: str) -> Task:
        for task in self.tasks:
            if task.task_id == task_id:
                return task
        raise UnknownTaskError(f"unknown task id: {task_id!r}")

    @property
    def task_ids(self) -> tuple[str, ...]:
        return tuple(t.task_id for t in self.tasks)


@dataclass(frozen=True)
class RowIssue:
    """A malformed dataset row, reported with its 1-based row number."""

    row: int
    field: str | None
    message: str


@dataclass(frozen=True)
class ParseResult:
    catalog: TaskCatalog
    issues: tuple[RowIssue, ...]


def _open_text(source, mode: str = "r"):
    if isinstance(source, (str, Path)):
        return open(source, mode, encoding="utf-8", newline=""), True
    return source, False


def _parse_list(cell: str) -> frozenset[str]:
    return frozenset(part.strip() for part in cell.split(LIST_SEPARATOR) if part.strip())


def parse_dataset(source: str | Path | TextIO, delimiter: str = ",") -> ParseResult:
    """Parse a delimited task dataset into a catalog.

    Raises SchemaError when a required column is absent. Malformed rows are
    rejected and reported in the result's ``issues`` with their row numbers;
    well-formed rows still make it into the catalog.
    """
    stream, owned = _open_text(source)
    try:
        reader = csv.DictReader(stream, delimiter=delimiter)
        header = reader.fieldnames or []
        for column in REQUIRED_COLUMNS:
            if column not in header:
                raise SchemaError(column)
        has_total = COLUMNS["total_prize"] in header

        raw_rows = []
        issues: list[RowIssue] = []
        seen_ids: set[str] = set()
        for row_number, row in enumerate(reader, start=2):  # 1 is the header
            rec, issue = _parse_row(row, row_number, has_total)
            if issue is not None:
                issues.append(issue)
                continue
            if rec["task_id"] in seen_ids:
                issues.append(RowIssue(row_number, COLUMNS["task_id"], "duplicate task id"))
                continue
            seen_ids.add(rec["task_id"])
            raw_rows.append((row_number, rec))
    finally:
        if owned:
            stream.close()

    all_dates = [
        d
        for _, rec in raw_rows
        for d in (rec["registration_start"], rec["registration_end"], rec["submission_end"])
    ]
    epoch = min(all_dates) if all_dates else None

    tasks = []
    for row_number, rec in raw_rows:
        kwargs = dict(rec)
        for attr in ("registration_start", "registration_end", "submission_end"):
            kwargs[attr] = (kwargs[attr] - epoch).days
        try:
            tasks.append(Task(**kwargs))
        except ValueError as exc:
            issues.append(RowIssue(row_number, None, str(exc)))

    return ParseResult(TaskCatalog.from_tasks(tasks, epoch=epoch), tuple(issues))


def _parse_row(row: dict, row_number: int, has_total: bool):
    def fail(attr, message):
        return None, RowIssue(row_number, COLUMNS[attr], message)

    rec: dict = {}
    rec["task_id"] = (row[COLUMNS["task_id"]] or "").strip()
    if not rec["task_id"]:
        return fail("task_id", "empty task id")

    for attr in ("registration_start", "registration_end", "submission_end"):
        cell = (row[COLUMNS[attr]] or "").strip()
        try:
            rec[attr] = date.fromisoformat(cell)
        except ValueError:
            return fail(attr, f"unparseable date: {cell!r}")

    for attr, conv in (
        ("prize", float),
        ("registrations", int),
        ("submissions", int),
        ("valid_submissions", int),
    ):
        cell = (row[COLUMNS[attr]] or "").strip()
        try:
            rec[attr] = conv(cell)
        except ValueError:
            return fail(attr, f"unparseable number: {cell!r}")

    if has_total:
        cell = (row[COLUMNS["total_prize"]] or "").strip()
        if cell:
            try:
                rec["total_prize"] = float(cell)
            except ValueError:
                return fail("total_prize", f"unparseable number: {cell!r}")

    rec["task_type"] = (row[COLUMNS["task_type"]] or "").strip()
    rec["technologies"] = _parse_list(row[COLUMNS["technologies"]] or "")
    rec["platforms"] = _parse_list(row[COLUMNS["platforms"]] or "")
    rec["requirement_text"] = (row[COLUMNS["requirement_text"]] or "").strip()
    rec["status"] = (row[COLUMNS["status"]] or "").strip().lower()

    # Surface ordering violations as row issues instead of constructor noise.
    if rec["registration_start"] > rec["submission_end"]:
        return fail("registration_start", "registration start after submission end")
    return rec, None


def write_dataset(catalog: TaskCatalog, target: str | Path | TextIO, delimiter: str = ",") -> None:
    """Write a catalog back to the canonical delimited format."""
    epoch = catalog.epoch or date(2014, 1, 1)
    stream, owned = _open_text(target, "w")
    try:
        writer = csv.writer(stream, delimiter=delimiter, lineterminator="\n")
        writer.writerow([COLUMNS[k] for k in COLUMNS])
        for t in catalog.tasks:
            writer.writerow(
                [
                    t.task_id,
                    (epoch + timedelta(days=t.registration_start)).isoformat(),
                    (epoch + timedelta(days=t.registration_end)).isoformat(),
                    (epoch + timedelta(days=t.submission_end)).isoformat(),
                    repr(t.prize),
                    repr(t.total_prize),
                    t.task_type,
                    LIST_SEPARATOR.join(sorted(t.technologies)),
                    LIST_SEPARATOR.join(sorted(t.platforms)),
                    t.requirement_text,
                    t.status,
                    t.registrations,
                    t.submissions,
                    t.valid_submissions,
                ]
            )
    finally:
        if owned:
            stream.close()


def dataset_to_string(catalog: TaskCatalog, delimiter: str = ",") -> str:
    buf = io.StringIO()
    write_dataset(catalog, buf, delimiter=delimiter)
    return buf.getvalue()


def parse_dependency_file(source: str | Path | TextIO) -> list[tuple[str, str]]:
    """Read `predecessor_id,successor_id` edge lines; '#' starts a comment."""
    stream, owned = _open_text(source)
    try:
        edges = []
        for line_number, line in enumerate(stream, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = [p.strip() for p in line.split(",")]
            if len(parts) != 2 or not all(parts):
                raise ValueError(f"line {line_number}: expected 'predecessor_id,successor_id'")
            edges.append((parts[0], parts[1]))
        return edges
    finally:
        if owned:
            stream.close()


@dataclass(frozen=True)
class Project:
    """A set of tasks with finish-to-start dependency edges.

    ``edges`` holds (predecessor, successor) index pairs into ``tasks``; a
    successor may start no earlier than the day after its predecessor's
    submission deadline. ``max_horizon`` bounds every start-day gene.
    """

    project_id: str
    tasks: tuple[Task, ...]
    edges: tuple[tuple[int, int], ...]
    max_horizon: int
    norms: CorpusNorms
    topo_order: tuple[int, ...]
    predecessors: tuple[tuple[int, ...], ...]

    def __len__(self) -> int:
        return len(self.tasks)

    def index_of(self, task_id: str) -> int:
        for i, task in enumerate(self.tasks):
            if task.task_id == task_id:
                return i
        raise UnknownTaskError(f"task {task_id!r} not in project")

    def durations(self) -> list[int]:
        return [t.duration for t in self.tasks]


def _topological_order(n: int, preds: Sequence[Sequence[int]], ids: Sequence[str]) -> list[int]:
    succs: list[list[int]] = [[] for _ in range(n)]
    indegree = [0] * n
    for j in range(n):
        for i in preds[j]:
            succs[i].append(j)
            indegree[j] += 1
    ready = sorted(i for i in range(n) if indegree[i] == 0)
    order: list[int] = []
    while ready:
        node = ready.pop(0)
        order.append(node)
        for nxt in succs[node]:
            indegree[nxt] -= 1
            if indegree[nxt] == 0:
                # Insertion keeps the frontier sorted for determinism.
                lo = 0
                while lo < len(ready) and ready[lo] < nxt:
                    lo += 1
                ready.insert(lo, nxt)
    if len(order) < n:
        raise CycleError(_find_cycle(n, succs, indegree, ids))
    return order


def _find_cycle(n, succs, indegree, ids) -> list[str]:
    remaining = {i for i in range(n) if indegree[i] > 0}
    start = min(remaining)
    path, seen = [], {}
    node = start
    while node not in seen:
        seen[node] = len(path)
        path.append(node)
        node = next(s for s in succs[node] if s in remaining)
    return [ids[i] for i in path[seen[node]:]]


def build_project(
    catalog: TaskCatalog,
    task_ids: Sequence[str],
    edges: Iterable[tuple[str, str]],
    max_horizon: int | None = None,
    project_id: str = "project",
) -> Project:
    """Assemble a validated project from catalog tasks and dependency edges.

    ``max_horizon`` defaults to the summed task durations (a fully sequential
    worst-case plan); pass an explicit value to widen or tighten the gene
    bound.
    """
    if len(set(task_ids)) != len(task_ids):
        raise UnknownTaskError("duplicate task ids in project definition")
    tasks = tuple(catalog.get(tid) for tid in task_ids)
    index = {tid: i for i, tid in enumerate(task_ids)}

    preds: list[list[int]] = [[] for _ in tasks]
    seen_edges = set()
    for pred_id, succ_id in edges:
        if pred_id not in index:
            raise UnknownTaskError(f"edge references unknown task id: {pred_id!r}")
        if succ_id not in index:
            raise UnknownTaskError(f"edge references unknown task id: {succ_id!r}")
        pair = (index[pred_id], index[succ_id])
        if pair in seen_edges:
            continue
        seen_edges.add(pair)
        preds[pair[1]].append(pair[0])

    order = _topological_order(len(tasks), preds, list(task_ids))
    if max_horizon is None:
        max_horizon = sum(t.duration for t in tasks)

    return Project(
        project_id=project_id,
        tasks=tasks,
        edges=tuple(sorted(seen_edges)),
        max_horizon=int(max_horizon),
        norms=catalog.norms,
        topo_order=tuple(order),
        predecessors=tuple(tuple(sorted(p)) for p in preds),
    )


def project_duration(project: Project, starts: Sequence[int]) -> int:
    """Days from the earliest start to the latest submission deadline."""
    if len(starts) != len(project.tasks):
        raise ValueError("starts length must equal the task count")
    finish = max(s + t.duration for s, t in zip(starts, project.tasks))
    return finish - min(starts)
