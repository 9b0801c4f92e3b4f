"""Shared engine for batched oscillatory moments  integral of
w(x) e^{sign 2 pi i lambda . phi(x)} dmu(x)  over many frequencies lambda.

Frequencies sharing a composite-Gauss panel signature are evaluated on a
common node set, so the phase map runs once per group and each frequency
costs one matmul column.  Monte-Carlo and digit-enumeration schemes share one
node set across all frequencies by construction.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import measures, phases
from .errors import QuadratureError, SchemeMismatchError
from .measures import (
    LebesgueBox,
    LebesgueDisc,
    PushforwardMeasure,
    QuadratureSpec,
    SelfSimilar,
    box_gauss_nodes,
    digit_nodes,
    integrate,
    panels_from_cycles,
)
from .seeding import spawn_rng

_CHUNK = 32  # max frequencies per exp/matmul chunk


def _chunk_size(n_nodes):
    # keep complex temporaries around 64 MB
    return max(2, min(_CHUNK, int(4_000_000 // max(n_nodes, 1)) or 2))


def effective_pair(mu, phi):
    """Collapse pushforward layers: Gram over psi_*mu == Gram of phi o psi over mu."""
    while isinstance(mu, PushforwardMeasure):
        phi = phases.compose(phi, mu.map)
        mu = mu.base
    return mu, phi


def oscillation_cycles(phi, mu, lambdas, n_probe=64):
    """Estimated oscillation cycles per input dimension for each frequency.

    Bounds |d(lambda . phi)/dx_i| by sampled Jacobian row maxima times the
    support width.  Returns (m, in_dim) cycles, or None when the phase has no
    usable Jacobian (digit maps).
    """
    lam = np.atleast_2d(lambdas)
    lo, hi = mu.support_box()
    width = hi - lo
    if isinstance(phi, phases.Identity):
        return np.abs(lam) * width[None, :]
    try:
        pts = measures.sample(mu, n_probe, seed=0xC3C1E5)
        J = phi.jacobian_batch(pts)
    except Exception:
        return None
    if not np.all(np.isfinite(J)):
        return None
    rowmax = np.max(np.abs(J), axis=0)  # (out_dim, in_dim)
    # cycles_i = sum_j |lambda_j| max|dphi_j/dx_i| * width_i
    cycles = (np.abs(lam) @ rowmax) * width[None, :]
    return cycles


def exp_moments(
    mu,
    phi,
    lambdas,
    quad: QuadratureSpec,
    sign=1,
    weight=None,
    support_box=None,
    threads=1,
    strict=True,
):
    """(values, errors) of the weighted exponential moments at each frequency.

    `support_box` restricts the integral to a sub-box of a LebesgueBox
    measure (used for indicator test functions); for other measures it masks
    nodes/samples outside the box.
    """
    mu, phi = effective_pair(mu, phi)
    lam = np.atleast_2d(np.asarray(lambdas, dtype=float))
    m = lam.shape[0]
    if lam.shape[1] != phi.out_dim:
        raise ValueError(
            f"frequency dim {lam.shape[1]} != phase output dim {phi.out_dim}"
        )

    if quad.scheme == "monte-carlo":
        return _mc_moments(mu, phi, lam, quad, sign, weight, support_box)
    if quad.scheme == "self-similar-digit":
        if not isinstance(mu, SelfSimilar):
            raise SchemeMismatchError(
                "self-similar-digit is only valid for SelfSimilar measures"
            )
        return _digit_moments(mu, phi, lam, quad, sign, weight, support_box)
    if quad.scheme == "tensor-gauss":
        base = mu
        if support_box is not None:
            if not isinstance(mu, LebesgueBox):
                raise SchemeMismatchError(
                    "support_box with tensor-gauss requires a box measure"
                )
            base = LebesgueBox(support_box[0], support_box[1])
        cycles = oscillation_cycles(phi, base, lam)
        if cycles is None:
            raise QuadratureError(
                "tensor-gauss needs a differentiable phase for oscillation "
                "control; use monte-carlo or self-similar-digit"
            )
        return _gauss_moments(
            base, phi, lam, quad, sign, weight, cycles, threads, strict
        )
    # adaptive: one integral per frequency
    return _adaptive_moments(mu, phi, lam, quad, sign, weight, support_box, threads)


def _integrand_factory(phi, lam_row, sign, weight, support_box):
    two_pi_i = sign * 2j * np.pi

    def f(pts):
        vals = np.exp(two_pi_i * (phi(pts) @ lam_row))
        if weight is not None:
            vals = vals * weight(pts)
        if support_box is not None:
            lo, hi = support_box
            inside = np.all((pts >= lo) & (pts < hi), axis=1)
            vals = np.where(inside, vals, 0.0)
        return vals

    return f


def _mc_moments(mu, phi, lam, quad, sign, weight, support_box):
    rng = spawn_rng(quad.seed, "mc-moments", mu.kind)
    pts = mu._sample(quad.n_samples, rng, quad.depth)
    w_vals = None if weight is None else np.asarray(weight(pts))
    if support_box is not None:
        lo, hi = support_box
        inside = np.all((pts >= lo) & (pts < hi), axis=1)
        mask = inside.astype(float)
        w_vals = mask if w_vals is None else w_vals * mask
    img = phi(pts)
    n = pts.shape[0]
    vals = np.empty(lam.shape[0], dtype=complex)
    errs = np.empty(lam.shape[0])
    step = _chunk_size(n)
    for start in range(0, lam.shape[0], step):
        block = lam[start : start + step]
        Z = np.exp(sign * 2j * np.pi * (img @ block.T))
        if w_vals is not None:
            Z *= w_vals[:, None]
        mean = Z.mean(axis=0)
        var = Z.real.var(axis=0, ddof=1) + Z.imag.var(axis=0, ddof=1)
        vals[start : start + step] = mu.total_mass * mean
        errs[start : start + step] = mu.total_mass * np.sqrt(var / n)
    return vals, errs


def _digit_moments(mu, phi, lam, quad, sign, weight, support_box):
    pts, w, tail_width = digit_nodes(mu, quad.depth)
    if support_box is not None:
        lo, hi = support_box
        inside = np.all((pts >= lo) & (pts < hi), axis=1)
        w = np.where(inside, w, 0.0)
    img = phi(pts)
    if weight is not None:
        w = w * np.asarray(weight(pts))
    vals = np.empty(lam.shape[0], dtype=complex)
    step = _chunk_size(img.shape[0])
    for start in range(0, lam.shape[0], step):
        block = lam[start : start + step]
        Z = np.exp(sign * 2j * np.pi * (img @ block.T))
        vals[start : start + step] = w @ Z
    # Lipschitz tail bound through the phase: the dropped tail moves a node by
    # at most tail_width, whose image movement is read off adjacent
    # finest-scale enumeration nodes (enumeration order is ascending).
    if img.shape[0] > 1:
        dx = np.diff(pts[:, 0])
        fine = dx <= 2 * tail_width * (mu.ratio - 1) + 1e-300
        if np.any(fine):
            dimg = np.linalg.norm(np.diff(img, axis=0), axis=1)
            fine_span = float(np.max(dimg[fine]))
        else:
            fine_span = float(tail_width)
    else:
        fine_span = 0.0
    errs = 2 * np.pi * np.linalg.norm(lam, axis=1) * fine_span
    return vals, errs


def _gauss_moments(mu, phi, lam, quad, sign, weight, cycles, threads, strict=True):
    if not isinstance(mu, (LebesgueBox, LebesgueDisc)):
        raise SchemeMismatchError(
            f"tensor-gauss is not valid for measure kind {mu.kind!r}"
        )
    if isinstance(mu, LebesgueDisc):
        # polar transform; quadrant panels keep the rule off the axes
        return _gauss_moments_disc(mu, phi, lam, quad, sign, weight, cycles)
    panels = panels_from_cycles(cycles, quad.order)  # (m, d)
    vals = np.empty(lam.shape[0], dtype=complex)
    errs = np.empty(lam.shape[0])
    groups: dict = {}
    for i in range(lam.shape[0]):
        groups.setdefault(tuple(panels[i]), []).append(i)

    def run_group(item):
        sig, idx = item
        idx = np.asarray(idx)
        block_vals = np.empty((2, idx.size), dtype=complex)
        for pass_no, order in enumerate((quad.order, quad.order + 8)):
            pts, w = box_gauss_nodes(mu.lo, mu.hi, order, np.asarray(sig))
            img = phi(pts)
            wloc = w if weight is None else w * np.asarray(weight(pts))
            step = _chunk_size(pts.shape[0])
            for start in range(0, idx.size, step):
                sel = idx[start : start + step]
                Z = np.exp(sign * 2j * np.pi * (img @ lam[sel].T))
                block_vals[pass_no, start : start + step] = wloc @ Z
        return idx, block_vals

    items = list(groups.items())
    if threads > 1 and len(items) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(run_group, items))
    else:
        results = [run_group(it) for it in items]
    for idx, block_vals in results:
        vals[idx] = block_vals[1]
        errs[idx] = np.abs(block_vals[1] - block_vals[0])
    if strict and not np.all(np.isfinite(vals.view(float))):
        raise QuadratureError("non-finite value in batched Gauss moments")
    return vals, errs


def _gauss_moments_disc(mu, phi, lam, quad, sign, weight, cycles):
    vals = np.empty(lam.shape[0], dtype=complex)
    errs = np.empty(lam.shape[0])
    for i in range(lam.shape[0]):
        f = _integrand_factory(phi, lam[i], sign, weight, None)
        hint = cycles[i] if cycles is not None else None
        v, e = integrate(f, mu, quad, osc_hint=hint)
        vals[i] = v
        errs[i] = e
    return vals, errs


def _adaptive_moments(mu, phi, lam, quad, sign, weight, support_box, threads):
    def one(i):
        f = _integrand_factory(phi, lam[i], sign, weight, support_box)
        return integrate(f, mu, quad)

    indices = range(lam.shape[0])
    if threads > 1 and lam.shape[0] > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(one, indices))
    else:
        results = [one(i) for i in indices]
    vals = np.array([r[0] for r in results], dtype=complex)
    errs = np.array([r[1] for r in results])
    return vals, errs
