"""Finite Borel measures: integration, sampling, Fourier transforms, pushforwards.

Supported kinds: Lebesgue measure on an axis-aligned box, Lebesgue measure on a
disc, equal-ratio self-similar digit measures (Cantor-type), and pushforwards of
any of these under a phase map.  Measures are immutable after construction and
safe to share across threads.

Quadrature schemes
------------------
tensor-gauss        composite tensor-product Gauss-Legendre; the error estimate
                    is the difference of two orders.  Callers integrating
                    oscillatory exponentials can pass `osc_hint` (estimated
                    cycles per dimension) and panels are chosen as
                    ceil(5*cycles/order), which keeps the rule in its
                    superexponential-convergence regime.
monte-carlo         i.i.d. sampling from the measure; error is one standard
                    error (acceptance-style checks should use 3-sigma bands).
self-similar-digit  exact enumeration of digit strings to the effective depth
                    min(depth, cap) with a tail-mean anchor added to every
                    node; the reported error is a Lipschitz-style tail bound.
adaptive            global adaptive subdivision with per-cell two-order Gauss
                    error estimates; the disc is handled in polar coordinates
                    starting from quadrant cells.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import (
    DomainError,
    ProductFormulaError,
    QuadratureError,
    SchemeMismatchError,
)
from .seeding import spawn_rng

_SCHEMES = ("tensor-gauss", "monte-carlo", "self-similar-digit", "adaptive")

# Digit enumeration is exact up to this many nodes; deeper digits enter through
# the tail-mean anchor, whose centered truncation error is far below float
# noise for Lipschitz integrands.
_MAX_DIGIT_NODES = 1 << 20

_PANEL_FACTOR = 5.0  # panels = ceil(PANEL_FACTOR * cycles / order)


@dataclass(frozen=True)
class QuadratureSpec:
    scheme: str
    order: int = 32
    n_samples: int = 100_000
    seed: int = 0
    depth: int = 30
    abs_tol: float = 1e-9
    max_subdivisions: int = 2000

    def __post_init__(self):
        if self.scheme not in _SCHEMES:
            raise SchemeMismatchError(f"unknown quadrature scheme {self.scheme!r}")
        if self.order < 2:
            raise ValueError("order must be >= 2")
        if self.depth < 1:
            raise ValueError("depth must be >= 1")
        if self.abs_tol <= 0:
            raise ValueError("abs tol must be > 0")

    def to_json_dict(self):
        out = {"scheme": self.scheme}
        if self.scheme == "tensor-gauss":
            out["order"] = self.order
        elif self.scheme == "monte-carlo":
            out.update(n_samples=self.n_samples, seed=self.seed)
        elif self.scheme == "self-similar-digit":
            out["depth"] = self.depth
        else:
            out.update(abs_tol=self.abs_tol, max_subdivisions=self.max_subdivisions)
        return out


def gauss(order=32) -> QuadratureSpec:
    return QuadratureSpec("tensor-gauss", order=order)


def monte_carlo(n_samples=100_000, seed=0) -> QuadratureSpec:
    return QuadratureSpec("monte-carlo", n_samples=n_samples, seed=seed)


def digit(depth=30) -> QuadratureSpec:
    return QuadratureSpec("self-similar-digit", depth=depth)


def adaptive(abs_tol=1e-9, max_subdivisions=2000, order=16) -> QuadratureSpec:
    return QuadratureSpec(
        "adaptive", abs_tol=abs_tol, max_subdivisions=max_subdivisions, order=order
    )


# ---------------------------------------------------------------------------
# measure kinds
# ---------------------------------------------------------------------------


class Measure:
    """Base class; subclasses set dim and total_mass at construction."""

    dim: int
    total_mass: float
    kind: str

    def support_box(self):
        """(lo, hi) arrays bounding the support."""
        raise NotImplementedError

    def _sample(self, n, rng, depth):
        raise NotImplementedError

    def to_json_dict(self):
        raise NotImplementedError


class LebesgueBox(Measure):
    kind = "lebesgue_box"

    def __init__(self, lo, hi):
        lo = np.atleast_1d(np.asarray(lo, dtype=float))
        hi = np.atleast_1d(np.asarray(hi, dtype=float))
        if lo.shape != hi.shape or lo.ndim != 1:
            raise ValueError("lo/hi must be 1-d vectors of equal length")
        if np.any(hi <= lo):
            raise ValueError("box must have positive side lengths")
        self.lo = lo
        self.hi = hi
        self.dim = lo.size
        self.total_mass = float(np.prod(hi - lo))

    def support_box(self):
        return self.lo.copy(), self.hi.copy()

    def _sample(self, n, rng, depth):
        u = rng.random((n, self.dim))
        return self.lo + u * (self.hi - self.lo)

    def to_json_dict(self):
        return {"kind": self.kind, "lo": self.lo.tolist(), "hi": self.hi.tolist()}

    def __repr__(self):
        return f"LebesgueBox({self.lo.tolist()}, {self.hi.tolist()})"


class LebesgueDisc(Measure):
    kind = "lebesgue_disc"

    def __init__(self, center=(0.0, 0.0), radius=1.0):
        center = np.asarray(center, dtype=float)
        if center.shape != (2,):
            raise ValueError("disc center must be a 2-vector")
        if radius <= 0:
            raise ValueError("disc radius must be positive")
        self.center = center
        self.radius = float(radius)
        self.dim = 2
        self.total_mass = math.pi * self.radius**2

    def support_box(self):
        r = self.radius
        return self.center - r, self.center + r

    def _sample(self, n, rng, depth):
        # rejection from the bounding box keeps the sampler uniform-exact
        out = np.empty((n, 2))
        filled = 0
        while filled < n:
            m = max(int((n - filled) * 1.6) + 16, 32)
            cand = self.center + self.radius * (2.0 * rng.random((m, 2)) - 1.0)
            keep = np.sum((cand - self.center) ** 2, axis=1) <= self.radius**2
            cand = cand[keep]
            take = min(cand.shape[0], n - filled)
            out[filled : filled + take] = cand[:take]
            filled += take
        return out

    def to_json_dict(self):
        return {"kind": self.kind, "center": self.center.tolist(), "radius": self.radius}

    def __repr__(self):
        return f"LebesgueDisc({self.center.tolist()}, {self.radius})"


class SelfSimilar(Measure):
    """Equal-contraction digit measure: law of sum_i d_{J_i} ratio^-i, J_i iid.

    `digits` is a tuple of (offset, weight) pairs; weights must sum to 1
    within 1e-12.  The middle-fourth Cantor measure is ratio=4 with digits
    ((0, 1/2), (2, 1/2)); the middle-third Cantor measure is ratio=3 with the
    same digit offsets.
    """

    kind = "self_similar"

    def __init__(self, ratio, digits):
        ratio = int(ratio)
        if ratio < 2:
            raise ValueError("ratio must be an integer >= 2")
        digits = tuple((float(d), float(w)) for d, w in digits)
        if not digits:
            raise ValueError("at least one digit is required")
        wsum = sum(w for _, w in digits)
        if abs(wsum - 1.0) > 1e-12:
            raise ValueError(f"digit weights must sum to 1 (got {wsum!r})")
        if any(w < 0 for _, w in digits):
            raise ValueError("digit weights must be nonnegative")
        self.ratio = ratio
        self.digits = digits
        self.dim = 1
        self.total_mass = 1.0
        self._offsets = np.array([d for d, _ in digits])
        self._weights = np.array([w for _, w in digits])
        self._cumw = np.cumsum(self._weights)

    def support_box(self):
        lo = self._offsets.min() / (self.ratio - 1)
        hi = self._offsets.max() / (self.ratio - 1)
        return np.array([lo]), np.array([hi])

    def _sample(self, n, rng, depth):
        x = np.zeros(n)
        scale = 1.0
        for _ in range(depth):
            scale /= self.ratio
            idx = np.searchsorted(self._cumw, rng.random(n), side="right")
            idx = np.minimum(idx, len(self.digits) - 1)
            x += self._offsets[idx] * scale
        return x[:, None]

    def digit_key(self):
        return (self.ratio, self.digits)

    def to_json_dict(self):
        return {
            "kind": self.kind,
            "ratio": self.ratio,
            "digits": [[d, w] for d, w in self.digits],
        }

    def __repr__(self):
        return f"SelfSimilar(ratio={self.ratio}, digits={self.digits})"


class PushforwardMeasure(Measure):
    """Image measure of `base` under the phase map `map`."""

    kind = "pushforward"

    def __init__(self, base, phase_map):
        if phase_map.in_dim != base.dim:
            raise DomainError(
                f"phase domain dim {phase_map.in_dim} != measure dim {base.dim}"
            )
        self.base = base
        self.map = phase_map
        self.dim = phase_map.out_dim
        self.total_mass = base.total_mass

    def support_box(self):
        # image box estimated from a deterministic sample of the base support
        pts = sample(self.base, 4096, seed=0)
        img = self.map(pts)
        lo = img.min(axis=0)
        hi = img.max(axis=0)
        pad = 1e-9 * (1.0 + np.abs(hi - lo))
        return lo - pad, hi + pad

    def _sample(self, n, rng, depth):
        return self.map(self.base._sample(n, rng, depth))

    def to_json_dict(self):
        return {
            "kind": self.kind,
            "base": self.base.to_json_dict(),
            "map": getattr(self.map, "to_json_dict", lambda: {"kind": "custom"})(),
        }


def middle_fourth_cantor() -> SelfSimilar:
    return SelfSimilar(4, ((0.0, 0.5), (2.0, 0.5)))


def middle_third_cantor() -> SelfSimilar:
    return SelfSimilar(3, ((0.0, 0.5), (2.0, 0.5)))


def pushforward(mu: Measure, phi) -> PushforwardMeasure:
    """Image measure of mu under phi; integration composes with phi."""
    return PushforwardMeasure(mu, phi)


def sample(mu: Measure, n: int, seed: int = 0, depth: int = 30) -> np.ndarray:
    """n i.i.d. draws from mu as an (n, dim) array, deterministic in seed."""
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = spawn_rng(seed, "sample", mu.kind)
    return mu._sample(n, rng, depth)


# ---------------------------------------------------------------------------
# Gauss-Legendre machinery
# ---------------------------------------------------------------------------


@lru_cache(maxsize=128)
def _leggauss(order):
    x, w = np.polynomial.legendre.leggauss(order)
    return x, w


def _panel_nodes_1d(lo, hi, order, panels):
    """Composite Gauss nodes/weights on [lo, hi] with `panels` equal panels."""
    x, w = _leggauss(order)
    edges = np.linspace(lo, hi, panels + 1)
    mids = 0.5 * (edges[:-1] + edges[1:])
    halfs = 0.5 * (edges[1:] - edges[:-1])
    nodes = (mids[:, None] + halfs[:, None] * x[None, :]).ravel()
    weights = (halfs[:, None] * w[None, :]).ravel()
    return nodes, weights


def box_gauss_nodes(lo, hi, order, panels):
    """Tensor-product composite Gauss rule on a box.

    Returns (pts (n, d), weights (n,)).  `panels` is a per-dimension array.
    """
    lo = np.atleast_1d(lo)
    hi = np.atleast_1d(hi)
    per_dim = [
        _panel_nodes_1d(lo[i], hi[i], order, int(panels[i])) for i in range(lo.size)
    ]
    grids = np.meshgrid(*[nd for nd, _ in per_dim], indexing="ij")
    pts = np.stack([g.ravel() for g in grids], axis=-1)
    wgrids = np.meshgrid(*[wd for _, wd in per_dim], indexing="ij")
    weights = np.prod(np.stack([wg.ravel() for wg in wgrids]), axis=0)
    return pts, weights


def panels_from_cycles(cycles, order):
    """Panels per dimension for a target of `cycles` oscillations per dim."""
    cycles = np.maximum(np.asarray(cycles, dtype=float), 0.0)
    return np.maximum(1, np.ceil(_PANEL_FACTOR * cycles / order).astype(int))


def _check_finite(vals, where):
    if not np.all(np.isfinite(vals.view(float) if np.iscomplexobj(vals) else vals)):
        raise QuadratureError(f"non-finite integrand value during {where}")


def _apply(f, pts):
    vals = np.asarray(f(pts))
    if vals.shape != (pts.shape[0],):
        raise QuadratureError(
            f"integrand returned shape {vals.shape}, expected ({pts.shape[0]},)"
        )
    _check_finite(vals, "quadrature")
    return vals


def _gauss_box_integral(f, lo, hi, order, panels):
    pts, w = box_gauss_nodes(lo, hi, order, panels)
    lo_val = w @ _apply(f, pts)
    pts2, w2 = box_gauss_nodes(lo, hi, order + 8, panels)
    hi_val = w2 @ _apply(f, pts2)
    return hi_val, abs(hi_val - lo_val)


def _polar_wrap(f, center):
    def g(rt):
        r = rt[:, 0]
        th = rt[:, 1]
        xy = np.stack(
            [center[0] + r * np.cos(th), center[1] + r * np.sin(th)], axis=-1
        )
        return np.asarray(f(xy)) * r

    return g


def _adaptive_cells(f, cells, abs_tol, max_subdivisions, order):
    """Global adaptive refinement over a list of boxes (lo, hi)."""
    order_lo = max(2, order // 2)
    counter = 0
    heap = []

    def eval_cell(lo, hi):
        ones = np.ones(len(lo), dtype=int)
        pts, w = box_gauss_nodes(lo, hi, order, ones)
        hi_val = w @ _apply(f, pts)
        pts2, w2 = box_gauss_nodes(lo, hi, order_lo, ones)
        lo_val = w2 @ _apply(f, pts2)
        return hi_val, abs(hi_val - lo_val)

    for lo, hi in cells:
        lo = np.asarray(lo, dtype=float)
        hi = np.asarray(hi, dtype=float)
        val, err = eval_cell(lo, hi)
        heapq.heappush(heap, (-err, counter, lo, hi, val, err))
        counter += 1

    subdivisions = 0
    while True:
        total_err = sum(item[5] for item in heap)
        if total_err <= abs_tol or subdivisions >= max_subdivisions:
            break
        neg_err, _, lo, hi, _, _ = heapq.heappop(heap)
        widths = hi - lo
        split = int(np.argmax(widths))
        mid = 0.5 * (lo[split] + hi[split])
        for piece in (0, 1):
            plo = lo.copy()
            phi_ = hi.copy()
            if piece == 0:
                phi_[split] = mid
            else:
                plo[split] = mid
            val, err = eval_cell(plo, phi_)
            heapq.heappush(heap, (-err, counter, plo, phi_, val, err))
            counter += 1
        subdivisions += 1

    value = sum(item[4] for item in heap)
    err = sum(item[5] for item in heap)
    return value, err, subdivisions


# ---------------------------------------------------------------------------
# digit enumeration
# ---------------------------------------------------------------------------


def digit_nodes(ss: SelfSimilar, depth: int):
    """Exact enumeration nodes/weights of the depth-truncated digit measure.

    The effective depth is min(depth, cap) keeping the node count below
    ~2^20; each node is shifted by the mean of the dropped tail so the
    truncation is centered.  Returns (pts (n,1), weights (n,), tail_width).
    """
    k = len(ss.digits)
    cap = max(1, int(math.log(_MAX_DIGIT_NODES) / math.log(max(k, 2))))
    d_eff = min(depth, cap) if k > 1 else depth
    pts = np.zeros(1)
    weights = np.ones(1)
    scale = 1.0
    for _ in range(d_eff):
        scale /= ss.ratio
        pts = (pts[:, None] + ss._offsets[None, :] * scale).ravel()
        weights = (weights[:, None] * ss._weights[None, :]).ravel()
    mean_digit = float(ss._offsets @ ss._weights)
    span = float(ss._offsets.max() - ss._offsets.min())
    geo = scale / (ss.ratio - 1)  # sum of ratio^-i for i > d_eff
    pts = pts + mean_digit * geo
    tail_width = span * geo
    return pts[:, None], weights, tail_width


def _digit_integral(f, ss, depth):
    pts, w, tail_width = digit_nodes(ss, depth)
    vals = _apply(f, pts)
    value = w @ vals
    # Lipschitz-style tail bound: finest-scale variation of the integrand
    # times the width of the dropped tail.
    if pts.shape[0] > 1:
        dx = np.diff(pts[:, 0])
        df = np.abs(np.diff(vals))
        slope = np.max(df / np.maximum(dx, tail_width)) if dx.size else 0.0
    else:
        slope = 0.0
    return value, float(slope * tail_width)


# ---------------------------------------------------------------------------
# integrate
# ---------------------------------------------------------------------------


def integrate(f, mu: Measure, quad: QuadratureSpec, osc_hint=None):
    """Approximate integral of f over mu: returns (value, err_estimate).

    f must be vectorized: it receives an (n, dim) array and returns (n,)
    values (real or complex).  `osc_hint` is an optional per-dimension cycle
    count used to panelize tensor-gauss rules for oscillatory integrands.
    """
    scheme = quad.scheme

    if isinstance(mu, PushforwardMeasure):
        phi = mu.map
        return integrate(lambda x: f(phi(x)), mu.base, quad, osc_hint=None)

    if isinstance(mu, SelfSimilar):
        if scheme == "self-similar-digit":
            return _digit_integral(f, mu, quad.depth)
        if scheme == "monte-carlo":
            return _mc_integral(f, mu, quad)
        raise SchemeMismatchError(
            f"{scheme} is not valid for self-similar measures; "
            "use self-similar-digit or monte-carlo"
        )

    if scheme == "self-similar-digit":
        raise SchemeMismatchError("self-similar-digit is only valid for SelfSimilar")

    if isinstance(mu, LebesgueBox):
        if scheme == "monte-carlo":
            return _mc_integral(f, mu, quad)
        if scheme == "tensor-gauss":
            panels = (
                panels_from_cycles(osc_hint, quad.order)
                if osc_hint is not None
                else np.ones(mu.dim, dtype=int)
            )
            return _gauss_box_integral(f, mu.lo, mu.hi, quad.order, panels)
        value, err, _ = _adaptive_cells(
            f, [(mu.lo, mu.hi)], quad.abs_tol, quad.max_subdivisions, quad.order
        )
        if err > 10 * quad.abs_tol:
            raise QuadratureError(
                f"adaptive quadrature error {err:.3e} above tolerance "
                f"{quad.abs_tol:.3e} after {quad.max_subdivisions} subdivisions"
            )
        return value, err

    if isinstance(mu, LebesgueDisc):
        if scheme == "monte-carlo":
            return _mc_integral(f, mu, quad)
        g = _polar_wrap(f, mu.center)
        quadrants = [
            (np.array([0.0, t0]), np.array([mu.radius, t0 + math.pi / 2]))
            for t0 in (0.0, math.pi / 2, math.pi, 3 * math.pi / 2)
        ]
        if scheme == "tensor-gauss":
            cyc = float(np.max(osc_hint)) if osc_hint is not None else 0.0
            panels = panels_from_cycles([cyc, cyc], quad.order)
            total = 0.0 + 0.0j
            toterr = 0.0
            for lo, hi in quadrants:
                v, e = _gauss_box_integral(g, lo, hi, quad.order, panels)
                total += v
                toterr += e
            return total, toterr
        value, err, _ = _adaptive_cells(
            g, quadrants, quad.abs_tol, quad.max_subdivisions, quad.order
        )
        if err > 10 * quad.abs_tol:
            raise QuadratureError(
                f"adaptive quadrature error {err:.3e} above tolerance "
                f"{quad.abs_tol:.3e} after {quad.max_subdivisions} subdivisions"
            )
        return value, err

    raise SchemeMismatchError(f"unsupported measure kind {mu.kind!r}")


def _mc_integral(f, mu, quad):
    rng = spawn_rng(quad.seed, "mc-integrate", mu.kind)
    pts = mu._sample(quad.n_samples, rng, quad.depth)
    vals = _apply(f, pts)
    mean = vals.mean()
    n = vals.shape[0]
    if np.iscomplexobj(vals):
        var = vals.real.var(ddof=1) + vals.imag.var(ddof=1)
    else:
        var = vals.var(ddof=1)
    se = math.sqrt(var / n)
    return mu.total_mass * mean, mu.total_mass * se


# ---------------------------------------------------------------------------
# Fourier transforms
# ---------------------------------------------------------------------------

_PRODUCT_GATE: dict = {}

_GATE_XI = (0.37, 0.91, 1.7)
_GATE_MC_SAMPLES = 6_000_000
_GATE_MC_TOL = 1e-3
_GATE_ENUM_TOL = 1e-6
_GATE_SEED = 0x5E1F51A1


def _mask_value(ss: SelfSimilar, xi):
    """One-level digit symbol m(xi) = sum_j w_j e^{2 pi i d_j xi}."""
    xi = np.asarray(xi, dtype=float)
    return np.sum(
        ss._weights[None, :]
        * np.exp(2j * np.pi * ss._offsets[None, :] * xi[..., None]),
        axis=-1,
    )


def _selfsimilar_product(ss: SelfSimilar, xi, trunc):
    xi = np.asarray(xi, dtype=float)
    out = np.ones(xi.shape, dtype=complex)
    scale = 1.0
    for _ in range(trunc):
        scale /= ss.ratio
        out *= _mask_value(ss, xi * scale)
    return out


def validate_product_formula(ss: SelfSimilar, trunc: int = 40) -> float:
    """Cross-validate the truncated product against independent oracles.

    Oracle 1: exact digit-string enumeration of the truncated measure.
    Oracle 2: Monte-Carlo digit sampling (tolerance 1e-3, fixed internal
    seed).  Returns the worst residual; raises ProductFormulaError on
    failure.  Results are cached per digit system, and the product-formula
    path refuses to run without a pass.
    """
    key = ss.digit_key()
    if key in _PRODUCT_GATE:
        return _PRODUCT_GATE[key]
    xi = np.array(_GATE_XI)
    prod = _selfsimilar_product(ss, xi, trunc)

    worst = 0.0
    for x, p in zip(xi, prod):
        enum_val, _ = _digit_integral(
            lambda pts: np.exp(2j * np.pi * x * pts[:, 0]), ss, 30
        )
        resid = abs(p - enum_val)
        worst = max(worst, resid)
        if resid > _GATE_ENUM_TOL:
            raise ProductFormulaError(
                f"product formula disagrees with digit enumeration at xi={x}: "
                f"|delta|={resid:.3e} > {_GATE_ENUM_TOL}"
            )

    rng = spawn_rng(_GATE_SEED, "product-gate", key)
    pts = ss._sample(_GATE_MC_SAMPLES, rng, 30)[:, 0]
    for x, p in zip(xi, prod):
        mc = np.exp(2j * np.pi * x * pts).mean()
        resid = abs(p - mc)
        worst = max(worst, resid)
        if resid > _GATE_MC_TOL:
            raise ProductFormulaError(
                f"product formula disagrees with the sampling oracle at xi={x}: "
                f"|delta|={resid:.3e} > {_GATE_MC_TOL}"
            )
    _PRODUCT_GATE[key] = worst
    return worst


def _box_ft(mu: LebesgueBox, xi):
    out = 1.0 + 0.0j
    for i in range(mu.dim):
        x = xi[i]
        if x == 0.0:
            out *= mu.hi[i] - mu.lo[i]
        else:
            out *= (
                np.exp(2j * np.pi * x * mu.hi[i]) - np.exp(2j * np.pi * x * mu.lo[i])
            ) / (2j * np.pi * x)
    return out


def _disc_ft(mu: LebesgueDisc, xi):
    from scipy.special import j1

    norm = float(np.hypot(xi[0], xi[1]))
    if norm == 0.0:
        return complex(mu.total_mass)
    phase = np.exp(2j * np.pi * (xi @ mu.center))
    return phase * mu.radius * j1(2 * math.pi * mu.radius * norm) / norm


def fourier_transform(mu: Measure, xi, trunc: int = 40):
    """mu-hat(xi) = integral of e^{2 pi i xi.x} dmu(x).

    SelfSimilar uses the truncated one-level-symbol product, gated behind
    `validate_product_formula`.  Boxes and discs use closed forms.
    Pushforwards reduce to a recognized self-similar image when possible and
    otherwise delegate to `integrate` with a scheme fit for the base.
    """
    xi = np.atleast_1d(np.asarray(xi, dtype=float))
    if xi.shape != (mu.dim,):
        raise DomainError(f"xi must have shape ({mu.dim},), got {xi.shape}")

    if isinstance(mu, SelfSimilar):
        if trunc < 1:
            raise ValueError("trunc must be >= 1 for self-similar measures")
        validate_product_formula(mu, trunc=max(trunc, 40))
        return complex(_selfsimilar_product(mu, np.array([xi[0]]), trunc)[0])

    if isinstance(mu, LebesgueBox):
        return complex(_box_ft(mu, xi))

    if isinstance(mu, LebesgueDisc):
        return complex(_disc_ft(mu, xi))

    if isinstance(mu, PushforwardMeasure):
        from .phases import Identity, as_selfsimilar  # lazy: avoids import cycle

        reduced = as_selfsimilar(mu.base, mu.map)
        if reduced is not None:
            return fourier_transform(reduced, xi, trunc=trunc)
        quad = _default_quad_for(mu.base, trunc)
        try:
            from ._oscillatory import exp_moments  # oscillation-aware panels

            vals, _ = exp_moments(mu, Identity(mu.dim), xi[None, :], quad)
            return complex(vals[0])
        except QuadratureError:
            value, _ = integrate(
                lambda x: np.exp(2j * np.pi * (x @ xi)),
                mu,
                monte_carlo_spec_for_ft(trunc),
            )
            return complex(value)

    raise SchemeMismatchError(f"unsupported measure kind {mu.kind!r}")


def monte_carlo_spec_for_ft(trunc):
    # sampling fallback for non-differentiable, non-reducible pushforwards
    return monte_carlo(n_samples=1_000_000, seed=0x0F0F0F0F)


def _default_quad_for(mu: Measure, trunc):
    if isinstance(mu, SelfSimilar):
        return digit(depth=trunc)
    if isinstance(mu, LebesgueBox):
        return gauss(order=64)
    if isinstance(mu, LebesgueDisc):
        return adaptive(abs_tol=1e-9, max_subdivisions=4000)
    if isinstance(mu, PushforwardMeasure):
        return _default_quad_for(mu.base, trunc)
    raise SchemeMismatchError(f"unsupported measure kind {mu.kind!r}")
