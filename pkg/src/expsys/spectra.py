"""Frequency sets: lattices, dual lattices, the four-adic binary spectrum,
and empirical Beurling densities."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError
from .seeding import spawn_rng


@dataclass(frozen=True)
class SpectrumSet:
    points: np.ndarray  # (m, d)
    generator: dict = field(default_factory=dict)
    truncation: float | None = None

    def __post_init__(self):
        pts = np.atleast_2d(np.asarray(self.points, dtype=float))
        if pts.shape[1] == 0:
            raise ValueError("spectrum points must be d-vectors")
        rounded = np.round(pts, 12)
        if np.unique(rounded, axis=0).shape[0] != pts.shape[0]:
            raise ValueError("spectrum points must be pairwise distinct")
        kind = self.generator.get("kind")
        if kind in ("lattice", "lambda4"):
            if not np.any(np.all(np.abs(pts) < 1e-12, axis=1)):
                raise ValueError(f"{kind} spectra must contain 0")
        object.__setattr__(self, "points", pts)

    @property
    def size(self):
        return self.points.shape[0]

    @property
    def dim(self):
        return self.points.shape[1]

    def to_json_dict(self):
        out = {"generator": self.generator, "size": self.size, "dim": self.dim}
        if self.truncation is not None:
            out["truncation"] = self.truncation
        return out


def explicit(points) -> SpectrumSet:
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if pts.shape[0] >= 1 and pts.shape[1] > pts.shape[0] and pts.shape[0] == 1:
        # a flat list of scalars is a 1-d spectrum
        pts = pts.reshape(-1, 1)
    return SpectrumSet(pts, generator={"kind": "explicit"})


def lattice(A, radius) -> SpectrumSet:
    """All points of A Z^d with sup-norm <= radius, sorted lexicographically."""
    A = np.atleast_2d(np.asarray(A, dtype=float))
    d = A.shape[0]
    if A.shape != (d, d):
        raise ValueError("A must be square")
    det = np.linalg.det(A)
    if abs(det) < 1e-14:
        raise DomainError("lattice generator matrix is singular")
    Ainv = np.linalg.inv(A)
    # |k|_inf <= ||A^-1||_inf * radius on the preimage of the sup-ball
    bound = int(np.ceil(np.max(np.sum(np.abs(Ainv), axis=1)) * radius + 1e-9))
    ranges = [np.arange(-bound, bound + 1)] * d
    K = np.stack(np.meshgrid(*ranges, indexing="ij"), axis=-1).reshape(-1, d)
    pts = K @ A.T
    keep = np.max(np.abs(pts), axis=1) <= radius + 1e-9
    pts = pts[keep]
    order = np.lexsort(pts.T[::-1])
    pts = pts[order]
    return SpectrumSet(
        pts, generator={"kind": "lattice", "A": A.tolist()}, truncation=float(radius)
    )


def integer_lattice(d, radius) -> SpectrumSet:
    return lattice(np.eye(d), radius)


def dual_lattice(A) -> np.ndarray:
    """Generator of the dual lattice: A^{-T}."""
    A = np.atleast_2d(np.asarray(A, dtype=float))
    if abs(np.linalg.det(A)) < 1e-14:
        raise DomainError("lattice generator matrix is singular")
    return np.linalg.inv(A).T


def lambda4(n: int) -> SpectrumSet:
    """Level-n four-adic binary spectrum {sum_{i<n} 4^i a_i : a_i in {0,1}}."""
    if not 1 <= n <= 16:
        raise ValueError("level must satisfy 1 <= n <= 16")
    vals = np.zeros(1, dtype=np.int64)
    for i in range(n):
        vals = np.concatenate([vals, vals + 4**i])
    vals = np.sort(vals)
    pts = vals.astype(float)[:, None]
    return SpectrumSet(pts, generator={"kind": "lambda4", "n": n}, truncation=n)


@dataclass
class DensityReport:
    windows: list
    d_plus: list
    d_minus: list
    verdict: str
    n_centers: int

    def to_json_dict(self):
        return {
            "windows": list(self.windows),
            "d_plus": list(self.d_plus),
            "d_minus": list(self.d_minus),
            "verdict": self.verdict,
            "n_centers": self.n_centers,
        }


def window_count(spectrum: SpectrumSet, lo, hi) -> int:
    """Count of spectrum points in the half-open box [lo, hi).

    Generator-backed sets (lattice, lambda4) are enumerated lazily inside the
    window; explicit sets must have a truncation covering the window.
    """
    lo = np.atleast_1d(np.asarray(lo, dtype=float))
    hi = np.atleast_1d(np.asarray(hi, dtype=float))
    kind = spectrum.generator.get("kind")
    if kind == "lattice":
        A = np.asarray(spectrum.generator["A"], dtype=float)
        d = A.shape[0]
        corners = np.stack(
            np.meshgrid(*[(lo[i], hi[i]) for i in range(d)], indexing="ij"), axis=-1
        ).reshape(-1, d)
        Kc = corners @ np.linalg.inv(A).T
        klo = np.floor(Kc.min(axis=0)).astype(int) - 1
        khi = np.ceil(Kc.max(axis=0)).astype(int) + 1
        ranges = [np.arange(klo[i], khi[i] + 1) for i in range(d)]
        K = np.stack(np.meshgrid(*ranges, indexing="ij"), axis=-1).reshape(-1, d)
        pts = K @ A.T
        inside = np.all((pts >= lo - 1e-12) & (pts < hi - 1e-12), axis=1)
        return int(np.count_nonzero(inside))
    if kind == "lambda4":
        # every element with a digit at 4^i >= hi exceeds hi, so enumerating
        # the levels with 4^i < hi is exact for any window below hi
        vals = np.zeros(1, dtype=np.int64)
        i = 0
        while i < 31 and 4**i < hi[0]:
            vals = np.concatenate([vals, vals + 4**i])
            i += 1
        vals = vals.astype(float)
        return int(np.count_nonzero((vals >= lo[0] - 1e-12) & (vals < hi[0] - 1e-12)))
    pts = spectrum.points
    if spectrum.truncation is not None:
        if np.any(np.abs(lo) > spectrum.truncation + 1e-9) or np.any(
            np.abs(hi) > spectrum.truncation + 1e-9
        ):
            raise DomainError("window exceeds the enumerable range of this spectrum")
    inside = np.all((pts >= lo - 1e-12) & (pts < hi - 1e-12), axis=1)
    return int(np.count_nonzero(inside))


def beurling_density(
    spectrum: SpectrumSet,
    windows,
    centers_box=None,
    n_centers=1000,
    seed=0,
) -> DensityReport:
    """Empirical window-count densities over sampled centers plus the origin.

    For each window side R, reports max/min over centers of
    #(spectrum in x + [-R/2, R/2)^d) / R^d.  Windows are half-open; the
    empirical max is a lower bound on the true sup and the empirical min an
    upper bound on the true inf.
    """
    d = spectrum.dim
    rng = spawn_rng(seed, "beurling-centers")
    if centers_box is None:
        centers_box = (np.full(d, -10.0), np.full(d, 10.0))
    clo = np.atleast_1d(np.asarray(centers_box[0], dtype=float))
    chi = np.atleast_1d(np.asarray(centers_box[1], dtype=float))
    centers = clo + rng.random((n_centers, d)) * (chi - clo)
    centers = np.vstack([np.zeros(d), centers])
    d_plus = []
    d_minus = []
    for R in windows:
        counts = np.array(
            [
                window_count(spectrum, x - R / 2.0, x + R / 2.0)
                for x in centers
            ],
            dtype=float,
        )
        dens = counts / R**d
        d_plus.append(float(dens.max()))
        d_minus.append(float(dens.min()))
    if len(windows) >= 2 and d_plus[-1] < 0.5 * d_plus[0]:
        verdict = "decreasing"
    elif len(windows) >= 2 and abs(d_plus[-1] - d_minus[-1]) <= max(
        2.0 * spectrum.dim / windows[-1], 1e-9
    ) * max(d_plus[-1], 1.0):
        verdict = "converging"
    else:
        verdict = "inconclusive"
    return DensityReport(
        windows=list(windows),
        d_plus=d_plus,
        d_minus=d_minus,
        verdict=verdict,
        n_centers=int(centers.shape[0]),
    )
