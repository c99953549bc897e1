"""Changed-fraction curves between every version pair.

Two granularities are measured from a pair of snapshots:

* uloc: the fraction of the baseline version's unique lines that are no
  longer present in the later version (a proxy for edits touching one
  specific line).
* file: the fraction of the baseline's files with no surviving copy in
  the later version, where a copy must keep both the filename and the
  exact content; moving a file to another directory does not count as a
  change, renaming it does.

The denominator is always the baseline size, so growth of the later
version never dilutes the fraction.  Line reintroductions count as
present: each pair is compared on its own, with no history memory.
"""

from __future__ import annotations

import csv
import enum
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from .errors import EmptyBaselineError
from .ingest import VersionSnapshot, load_all_snapshots

__all__ = [
    "MetricKind",
    "ChangeCurve",
    "CurveFamily",
    "uloc_changed_fraction",
    "file_changed_fraction",
    "build_curve_family",
    "write_curves_csv",
    "read_curves_csv",
]

CURVES_CSV_HEADER = ("baseline_ordinal", "baseline_label", "baseline_size", "offset", "changed_fraction")


class MetricKind(enum.Enum):
    ULOC = "uloc"
    FILE = "file"


@dataclass(frozen=True)
class ChangeCurve:
    """Changed fractions from one baseline to every later version.

    Offsets run 1..last with no gaps; every fraction lies in [0, 1].
    """

    baseline_ordinal: int
    baseline_label: str
    metric: MetricKind
    group: str
    points: tuple[tuple[int, float], ...]
    baseline_size: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "points", tuple((int(n), float(p)) for n, p in self.points))
        for i, (n, p) in enumerate(self.points):
            if n != i + 1:
                raise ValueError(f"offsets must be 1..k contiguous; point {i} has n={n}")
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"changed fraction out of range at n={n}: {p}")

    def fraction_at(self, offset: int) -> float:
        return self.points[offset - 1][1]


@dataclass(frozen=True)
class CurveFamily:
    """All change curves of one group/metric, one per baseline version."""

    software: str
    group: str
    metric: MetricKind
    curves: tuple[ChangeCurve, ...]
    warnings: tuple[str, ...] = field(default=())

    def __post_init__(self) -> None:
        object.__setattr__(self, "curves", tuple(self.curves))
        object.__setattr__(self, "warnings", tuple(self.warnings))
        ordinals = [c.baseline_ordinal for c in self.curves]
        if len(set(ordinals)) != len(ordinals):
            raise ValueError("duplicate baseline ordinals in curve family")


def uloc_changed_fraction(base: VersionSnapshot, later: VersionSnapshot, group: str) -> float:
    """1 - |uloc_base intersect uloc_later| / |uloc_base|."""
    base_set = base.group(group).uloc
    later_set = later.group(group).uloc
    if not base_set:
        raise EmptyBaselineError(
            f"version {base.version_label!r} group {group!r} has an empty uloc set"
        )
    return 1.0 - len(base_set & later_set) / len(base_set)


def file_changed_fraction(base: VersionSnapshot, later: VersionSnapshot, group: str) -> float:
    """Fraction of baseline files with no same-name same-content survivor.

    A baseline file is unchanged iff the later snapshot has at least one
    file with the identical basename and identical content digest; the
    directory part of the path is ignored.  With duplicate basenames any
    matching copy counts, a permissive reading that path insensitivity
    forces.
    """
    base_files = base.group(group).files
    if not base_files:
        raise EmptyBaselineError(
            f"version {base.version_label!r} group {group!r} has no files"
        )
    later_index: dict[str, set[bytes]] = {}
    for record in later.group(group).files:
        later_index.setdefault(record.basename, set()).add(record.content_digest)
    unchanged = sum(
        1
        for record in base_files
        if record.content_digest in later_index.get(record.basename, ())
    )
    return 1.0 - unchanged / len(base_files)


def _fraction(base: VersionSnapshot, later: VersionSnapshot, group: str, metric: MetricKind) -> float:
    if metric is MetricKind.ULOC:
        return uloc_changed_fraction(base, later, group)
    return file_changed_fraction(base, later, group)


def build_curve_family(
    snapshots: str | Path | Sequence[VersionSnapshot],
    group: str,
    metric: MetricKind,
    *,
    software: str = "",
) -> CurveFamily:
    """Compare every baseline with every later version.

    ``snapshots`` may be a store directory or an ordered sequence of
    snapshots.  A baseline that is empty under the metric yields no
    curve; the omission is recorded in the family's warnings instead of
    being silently zeroed.
    """
    if isinstance(snapshots, (str, Path)):
        snapshots = load_all_snapshots(snapshots)
    snapshots = sorted(snapshots, key=lambda s: s.ordinal)
    if len(snapshots) < 2:
        raise ValueError("need at least 2 versions to build change curves")
    curves: list[ChangeCurve] = []
    warnings: list[str] = []
    for i, base in enumerate(snapshots[:-1]):
        payload = base.group(group)
        size = payload.uloc_count if metric is MetricKind.ULOC else payload.file_count
        try:
            points = tuple(
                (j - i, _fraction(base, snapshots[j], group, metric))
                for j in range(i + 1, len(snapshots))
            )
        except EmptyBaselineError as exc:
            warnings.append(f"baseline {base.version_label!r} omitted: {exc}")
            continue
        curves.append(
            ChangeCurve(
                baseline_ordinal=base.ordinal,
                baseline_label=base.version_label,
                metric=metric,
                group=group,
                points=points,
                baseline_size=size,
            )
        )
    return CurveFamily(
        software=software,
        group=group,
        metric=metric,
        curves=tuple(curves),
        warnings=tuple(warnings),
    )


def write_curves_csv(family: CurveFamily, path: str | Path) -> None:
    """Emit one row per (baseline, offset, changed_fraction).

    Columns: baseline_ordinal, baseline_label, baseline_size, offset,
    changed_fraction.  This is the plot data for rendering the curve
    family with external tools.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CURVES_CSV_HEADER)
        for curve in family.curves:
            for n, p in curve.points:
                writer.writerow(
                    [curve.baseline_ordinal, curve.baseline_label, curve.baseline_size, n, repr(p)]
                )


def read_curves_csv(
    path: str | Path,
    *,
    group: str = "",
    metric: MetricKind = MetricKind.ULOC,
    software: str = "",
) -> CurveFamily:
    """Rebuild a curve family from its CSV emission."""
    path = Path(path)
    rows: dict[int, tuple[str, int, list[tuple[int, float]]]] = {}
    with path.open(encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if tuple(header or ()) != CURVES_CSV_HEADER:
            raise ValueError(f"{path}: unexpected curves CSV header {header!r}")
        for row in reader:
            ordinal, label, size, n, p = int(row[0]), row[1], int(row[2]), int(row[3]), float(row[4])
            rows.setdefault(ordinal, (label, size, []))[2].append((n, p))
    curves = [
        ChangeCurve(
            baseline_ordinal=ordinal,
            baseline_label=label,
            metric=metric,
            group=group,
            points=tuple(sorted(points)),
            baseline_size=size,
        )
        for ordinal, (label, size, points) in sorted(rows.items())
    ]
    return CurveFamily(
        software=software, group=group, metric=metric, curves=tuple(curves)
    )
