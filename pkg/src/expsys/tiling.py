"""Numerical lattice packing/tiling machinery for phase-map images.

A measure-preserving injective image phi([0,1)^d) that packs under a lattice
of matching volume tiles; these checks realize that criterion with a
chi-square uniformity test on lattice-reduced samples, Monte-Carlo overlap
volumes with analytic inversion where the phase structure allows it, and a
combined verdict.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .errors import InversionError
from .measures import LebesgueBox
from .phases import measure_preservation_check
from .seeding import spawn_rng

UNIFORM = "UNIFORM"
NONUNIFORM = "NONUNIFORM"
INCONCLUSIVE = "INCONCLUSIVE"
TILES = "TILES"
NOT_TILING = "NOT-TILING"


@dataclass
class HistogramReport:
    chi2: float
    dof: int
    verdict: str
    empty_bins: int
    n: int
    bins_per_dim: int
    counts: np.ndarray

    def to_json_dict(self):
        return {
            "chi2": self.chi2,
            "dof": self.dof,
            "verdict": self.verdict,
            "empty_bins": self.empty_bins,
            "n": self.n,
            "bins_per_dim": self.bins_per_dim,
        }

    def write_csv(self, path, lattice_A):
        d = self.counts.ndim
        centers = [(np.arange(self.bins_per_dim) + 0.5) / self.bins_per_dim] * d
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow([f"center_{i+1}" for i in range(d)] + ["count"])
            grid = np.stack(np.meshgrid(*centers, indexing="ij"), axis=-1).reshape(-1, d)
            frac_to_pt = np.asarray(lattice_A, dtype=float)
            for frac, cnt in zip(grid, self.counts.ravel()):
                writer.writerow([repr(v) for v in frac @ frac_to_pt.T] + [int(cnt)])


def frac_histogram_test(
    phi, box, lattice_A, n=100_000, bins=16, seed=0
) -> HistogramReport:
    """Chi-square uniformity of phi(uniform(box)) reduced modulo the lattice.

    `bins` is the per-dimension bin count.  Verdict is UNIFORM below the 99th
    percentile of chi-square(dof), NONUNIFORM above the 99.99th, else
    INCONCLUSIVE; the band prevents flaky verdicts at large n.
    """
    from scipy.stats import chi2 as chi2_dist

    lo, hi = _as_box(box)
    d = lo.size
    cells = bins**d
    if n < 10 * cells:
        raise ValueError(f"n={n} too small for {cells} bins (need >= {10 * cells})")
    A = np.atleast_2d(np.asarray(lattice_A, dtype=float))
    rng = spawn_rng(seed, "frac-histogram")
    pts = lo + rng.random((n, d)) * (hi - lo)
    img = phi(pts)
    t = img @ np.linalg.inv(A).T
    frac = t - np.floor(t)
    idx = np.clip((frac * bins).astype(int), 0, bins - 1)
    flat = np.ravel_multi_index(idx.T, (bins,) * d)
    counts = np.bincount(flat, minlength=cells).reshape((bins,) * d)
    expected = n / cells
    chi2 = float(np.sum((counts - expected) ** 2) / expected)
    dof = cells - 1
    if chi2 <= chi2_dist.ppf(0.99, dof):
        verdict = UNIFORM
    elif chi2 >= chi2_dist.ppf(0.9999, dof):
        verdict = NONUNIFORM
    else:
        verdict = INCONCLUSIVE
    return HistogramReport(
        chi2=chi2,
        dof=dof,
        verdict=verdict,
        empty_bins=int(np.count_nonzero(counts == 0)),
        n=n,
        bins_per_dim=bins,
        counts=counts,
    )


class _GridMembership:
    """Occupancy-grid membership test for images of maps without an inverse.

    256^d cells over the image bounding box, marked from a dense forward
    sweep and dilated by one cell; approximate by construction.
    """

    def __init__(self, phi, lo, hi, cells=256, sweep=1024):
        d = lo.size
        grids = [np.linspace(lo[i], hi[i], sweep, endpoint=False) for i in range(d)]
        mesh = np.stack(np.meshgrid(*grids, indexing="ij"), axis=-1).reshape(-1, d)
        img = phi(mesh)
        self.lo = img.min(axis=0)
        self.hi = img.max(axis=0)
        span = np.where(self.hi > self.lo, self.hi - self.lo, 1.0)
        self.span = span
        self.cells = cells
        idx = np.clip(((img - self.lo) / span * cells).astype(int), 0, cells - 1)
        occ = np.zeros((cells,) * d, dtype=bool)
        occ[tuple(idx.T)] = True
        for axis in range(d):
            occ |= np.roll(occ, 1, axis=axis) | np.roll(occ, -1, axis=axis)
        self.occ = occ

    def __call__(self, y):
        inside = np.all((y >= self.lo) & (y <= self.hi), axis=1)
        idx = np.clip(
            ((y - self.lo) / self.span * self.cells).astype(int), 0, self.cells - 1
        )
        hits = self.occ[tuple(idx.T)]
        return hits & inside, np.zeros(y.shape[0], dtype=bool)


def _invert_into_box(phi, y, lo, hi):
    """(inside_mask, failure_mask) for membership y in phi([lo, hi))."""
    try:
        x, ok = phi.invert(y)
    except InversionError:
        return None
    inside = ok & np.all((x >= lo - 1e-12) & (x < hi - 1e-12), axis=1)
    return inside, ~ok


@dataclass
class OverlapReport:
    volume_est: float
    std_err: float
    n: int
    failures: int
    valid: bool

    def to_json_dict(self):
        return {
            "volume_est": self.volume_est,
            "std_err": self.std_err,
            "n": self.n,
            "failures": self.failures,
            "valid": bool(self.valid),
        }


def overlap_volume(phi, box, k, n=100_000, seed=0, membership=None) -> OverlapReport:
    """Monte-Carlo volume of (phi(box) + k) intersected with phi(box).

    Draws x uniform in the box, forms y = phi(x) + k, and tests y in phi(box)
    by analytic inversion (back-substitution for triangular structures) or an
    occupancy grid for custom maps.  Caller asserts injectivity on the box
    (probe available in the phases module).  More than 1% inversion failures
    invalidates the estimate.
    """
    lo, hi = _as_box(box)
    k = np.asarray(k, dtype=float)
    vol = float(np.prod(hi - lo))
    rng = spawn_rng(seed, "overlap", tuple(np.round(k, 9).tolist()))
    pts = lo + rng.random((n, lo.size)) * (hi - lo)
    y = phi(pts) + k
    result = _invert_into_box(phi, y, lo, hi) if membership is None else membership(y)
    if result is None:
        member = _GridMembership(phi, lo, hi)
        result = member(y)
    inside, failed = result
    failures = int(np.count_nonzero(failed))
    p = float(np.count_nonzero(inside)) / n
    se = vol * math.sqrt(max(p * (1 - p), 0.0) / n)
    return OverlapReport(
        volume_est=vol * p,
        std_err=se,
        n=n,
        failures=failures,
        valid=failures <= 0.01 * n,
    )


@dataclass
class TilingReport:
    packing: str
    volume_match: bool
    tiling: str
    histogram: HistogramReport
    overlaps: dict
    preservation_max_dev: float

    def to_json_dict(self):
        return {
            "packing": self.packing,
            "volume_match": bool(self.volume_match),
            "tiling": self.tiling,
            "histogram": self.histogram.to_json_dict(),
            "overlaps": {
                str(k): rep.to_json_dict() for k, rep in self.overlaps.items()
            },
            "preservation_max_dev": self.preservation_max_dev,
        }


def tiling_verdict(
    phi,
    box,
    lattice_A,
    n=100_000,
    bins=16,
    radius=2,
    seed=0,
    preservation_tol=1e-6,
    exclusion=None,
) -> TilingReport:
    """Packing (zero lattice-translate overlaps) + volume match => tiling.

    Packing checks every nonzero |k|_inf <= radius; an overlap counts as
    positive above max(3 sigma, a 3/n Poisson floor).  Volume match combines
    a sampled |det J| == 1 check with m(box) == |det A|.  The chi-square
    histogram corroborates; a NONUNIFORM histogram blocks a TILES verdict.
    """
    lo, hi = _as_box(box)
    d = lo.size
    A = np.atleast_2d(np.asarray(lattice_A, dtype=float))
    vol = float(np.prod(hi - lo))

    hist = frac_histogram_test(phi, box, A, n=n, bins=bins, seed=seed)
    pres = measure_preservation_check(
        phi,
        LebesgueBox(lo, hi),
        n=min(n, 20_000),
        tol=preservation_tol,
        seed=seed,
        exclusion=exclusion,
    )
    volume_match = pres.passed and abs(vol - abs(np.linalg.det(A))) <= 1e-9 * max(
        vol, 1.0
    )

    membership = None
    try:
        phi.invert(phi(np.atleast_2d((lo + hi) / 2.0)))
    except InversionError:
        membership = _GridMembership(phi, lo, hi)

    overlaps = {}
    packing = "PASS"
    ranges = [np.arange(-radius, radius + 1)] * d
    for kvec in np.stack(np.meshgrid(*ranges, indexing="ij"), axis=-1).reshape(-1, d):
        if np.all(kvec == 0):
            continue
        shift = kvec @ A.T
        rep = overlap_volume(
            phi, box, shift, n=n, seed=seed, membership=membership
        )
        overlaps[tuple(int(v) for v in kvec)] = rep
        floor = 3.0 * vol / n
        if rep.volume_est > max(3.0 * rep.std_err, floor):
            packing = "FAIL"

    if packing == "PASS" and volume_match and hist.verdict != NONUNIFORM:
        tiling = TILES
    elif packing == "FAIL" or hist.verdict == NONUNIFORM or not volume_match:
        tiling = NOT_TILING
    else:
        tiling = INCONCLUSIVE
    return TilingReport(
        packing=packing,
        volume_match=volume_match,
        tiling=tiling,
        histogram=hist,
        overlaps=overlaps,
        preservation_max_dev=pres.max_dev,
    )


def _as_box(box):
    if isinstance(box, LebesgueBox):
        return box.support_box()
    lo, hi = box
    return (
        np.atleast_1d(np.asarray(lo, dtype=float)),
        np.atleast_1d(np.asarray(hi, dtype=float)),
    )
