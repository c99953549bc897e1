#!/usr/bin/env python3
"""Print discoverability bounds derived from the published parameter table.

For each corpus and extension group, the line-level fit bounds how long
a subtle in-code flaw stays findable in the current source, and the
file-level fit does the same for a crude one (any edit to the file
counts as a hit). Pairing the two brackets the discovery probability at
a given age for anything in between.
"""

from codesurvival.discoverability import bounds, persistence_summary
from codesurvival.fitting import FitResult
from codesurvival.reference import REFERENCE_FITS, reference_fit

HORIZON = 10


def as_fit(row) -> FitResult:
    return FitResult(
        params=row.params,
        log_likelihood=float("nan"),
        residual_rms=float("nan"),
        points_used=0,
        converged=True,
        warnings=frozenset(),
        regime=row.regime,
        group=row.group,
        metric=row.metric,
    )


def main() -> None:
    # Line-level fits are whole-history; file-level fits may be split into
    # regimes, so enumerate pairs from the file side.
    pairs = sorted(
        (r.software, r.group, r.regime) for r in REFERENCE_FITS if r.metric == "file"
    )
    print(f"{'software':8} {'group':5} {'regime':7} {'subtle P(10)':>12} {'obvious P(10)':>13}")
    for software, group, regime in pairs:
        uloc = as_fit(reference_fit(software, group, "uloc", "all"))
        file = as_fit(reference_fit(software, group, "file", regime))
        bracket = bounds(uloc, file, HORIZON)
        print(
            f"{software:8} {group:5} {regime:7} "
            f"{bracket.subtle[-1][1]:12.4f} {bracket.obvious[-1][1]:13.4f}"
        )

    print()
    print("line-level persistence (versions until half of inserted code is revised):")
    for row in REFERENCE_FITS:
        if row.metric != "uloc":
            continue
        summary = persistence_summary(as_fit(row), horizon=HORIZON)
        crossing = summary.median_crossing
        crossing_text = f"median gone by v+{crossing}" if crossing else "median never revised"
        print(
            f"  {row.software:8} {row.group:4} {crossing_text:24} "
            f"undiscovered mass {summary.undiscovered_mass:.3f}"
        )


if __name__ == "__main__":
    main()
