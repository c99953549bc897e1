"""Published lifetime parameters for three open-source corpora.

These are the reference fits measured on the full Mozilla Firefox
(v1.0-v47.0), GNU tar (v1.14-v1.29) and glibc (v2.0-v2.23) histories.
The underlying corpora are multi-gigabyte and are not shipped with this
package; the rows below let users evaluate discoverability bounds for
those projects without re-measuring, and give the test suite fixed
parameter sets to check model identities against.

Each row carries the published base rate alongside the (lambda, A) pair
so the identity ``base_rate == A * lambda`` can be verified against the
rounding used in the original reports.
"""

from __future__ import annotations

from dataclasses import dataclass

from .model import SaturationParams

__all__ = ["ReferenceFit", "REFERENCE_FITS", "reference_fit"]


@dataclass(frozen=True)
class ReferenceFit:
    software: str
    group: str
    metric: str  # "uloc" or "file"
    regime: str  # "all", or "old"/"recent" where behavior split
    lam: float
    A: float
    published_base_rate: float

    @property
    def params(self) -> SaturationParams:
        return SaturationParams(A=self.A, lam=self.lam)


REFERENCE_FITS: tuple[ReferenceFit, ...] = (
    # Mozilla Firefox, 47 versions
    ReferenceFit("firefox", "cpp", "uloc", "all", 0.0369, 0.777, 0.0287),
    ReferenceFit("firefox", "cpp", "file", "all", 0.302, 0.869, 0.262),
    ReferenceFit("firefox", "js", "uloc", "all", 0.0541, 0.318, 0.0172),
    ReferenceFit("firefox", "js", "file", "all", 0.121, 0.531, 0.0643),
    ReferenceFit("firefox", "h", "uloc", "all", 0.0363, 0.584, 0.0212),
    ReferenceFit("firefox", "h", "file", "all", 0.186, 0.784, 0.146),
    # GNU tar, 16 versions
    ReferenceFit("gnu", "c", "uloc", "all", 1.856, 0.062, 0.115),
    ReferenceFit("gnu", "c", "file", "all", 0.883, 0.991, 0.875),
    ReferenceFit("gnu", "h", "uloc", "all", 0.0757, 0.608, 0.046),
    ReferenceFit("gnu", "h", "file", "all", 0.917, 0.972, 0.891),
    # glibc, 24 versions; file metrics split into two steady states at v2.16
    ReferenceFit("glibc", "c", "uloc", "all", 0.00494, 2.158, 0.0107),
    ReferenceFit("glibc", "c", "file", "recent", 0.991, 0.766, 0.759),
    ReferenceFit("glibc", "c", "file", "old", 0.158, 0.276, 0.0436),
    ReferenceFit("glibc", "h", "uloc", "all", 0.0216, 0.315, 0.0068),
    ReferenceFit("glibc", "h", "file", "recent", 1.02, 0.759, 0.774),
    ReferenceFit("glibc", "h", "file", "old", 0.122, 0.447, 0.0545),
    ReferenceFit("glibc", "sh", "uloc", "all", 0.00472, 1.791, 0.00845),
    ReferenceFit("glibc", "sh", "file", "recent", 1.46, 0.915, 1.33),
    ReferenceFit("glibc", "sh", "file", "old", 0.357, 0.256, 0.0914),
)


def reference_fit(software: str, group: str, metric: str, regime: str = "all") -> ReferenceFit:
    """Look up one reference row; raises KeyError if absent."""
    for row in REFERENCE_FITS:
        if (row.software, row.group, row.metric, row.regime) == (software, group, metric, regime):
            return row
    raise KeyError(f"no reference fit for {software}/{group}/{metric}/{regime}")
