"""Adaptive quadrature engines and sphere Monte Carlo.

All integrands are vectorized: a 1-d integrand maps a float array of
abscissae to an array of (possibly complex) values, an n-d integrand maps
an (m, n) array of points to an (m,) array.

Endpoint singularities |t - t0|^(-alpha), alpha < 1, are handled by
splitting at the declared locus and substituting t = t0 +/- u^(1/(1-alpha)),
which flattens the real-power part exactly; the adaptive Gauss-Kronrod
core then only ever sees a bounded integrand.
"""

from __future__ import annotations

import heapq
import itertools

import numpy as np

from .config import DEFAULT_CONFIG, QuadratureConfig
from .errors import (
    DimensionTooLarge,
    MaxSubdivisionsExceeded,
    NonIntegrableSingularity,
)

# 15-point Kronrod extension of 7-point Gauss (QUADPACK dqk15 constants).
_XK = np.array(
    [
        -0.991455371120813,
        -0.949107912342759,
        -0.864864423359769,
        -0.741531185599394,
        -0.586087235467691,
        -0.405845151377397,
        -0.207784955007898,
        0.0,
        0.207784955007898,
        0.405845151377397,
        0.586087235467691,
        0.741531185599394,
        0.864864423359769,
        0.949107912342759,
        0.991455371120813,
    ]
)
_WK = np.array(
    [
        0.022935322010529,
        0.063092092629979,
        0.104790010322250,
        0.140653259715525,
        0.169004726639267,
        0.190350578064785,
        0.204432940075298,
        0.209482141084728,
        0.204432940075298,
        0.190350578064785,
        0.169004726639267,
        0.140653259715525,
        0.104790010322250,
        0.063092092629979,
        0.022935322010529,
    ]
)
_WG = np.array(
    [
        0.129484966168870,
        0.279705391489277,
        0.381830050505119,
        0.417959183673469,
        0.381830050505119,
        0.279705391489277,
        0.129484966168870,
    ]
)
_GAUSS_IDX = np.arange(1, 15, 2)

# seed panel density of the nested engine; structure below the seed scale
# can fool the Kronrod-Gauss error estimate, so these are deliberately
# generous for the innermost levels
INNER_SEED_PANELS = 6
OUTER_SEED_PANELS = 3


class _Segment:
    """Sub-interval in map space: u in [0, span] -> t, with Jacobian."""

    __slots__ = ("span", "kind", "t_anchor", "power", "delta_min", "u_floor")

    def __init__(self, span, kind, t_anchor, power=1.0):
        self.span = span          # length in u-space
        self.kind = kind          # "id" | "left" | "right"
        self.t_anchor = t_anchor  # left endpoint (id/left) or right endpoint (right)
        self.power = power        # p = 1/(1-alpha)
        if kind == "id" or t_anchor == 0.0:
            self.delta_min = 0.0
            self.u_floor = 0.0
        else:
            # smallest offset from the singular anchor that survives
            # rounding; mapped points are clamped to it so the integrand
            # is never evaluated exactly on its singularity
            self.delta_min = 64.0 * np.finfo(float).eps * abs(t_anchor)
            self.u_floor = self.delta_min ** (1.0 / power)

    def map(self, u):
        if self.kind == "id":
            return self.t_anchor + u, np.ones_like(u)
        p = self.power
        up = u**p
        if self.delta_min > 0.0:
            up = np.maximum(up, self.delta_min)
        jac = p * u ** (p - 1.0)
        if self.kind == "left":
            return self.t_anchor + up, jac
        return self.t_anchor - up, jac


def _build_segments(a, b, singularities):
    """Split [a, b] at declared singular points and attach substitutions."""
    pts = []
    for t0, alpha in singularities:
        if alpha >= 1.0:
            raise NonIntegrableSingularity(
                f"declared exponent alpha={alpha} >= 1 at t0={t0}"
            )
        if a <= t0 <= b:
            pts.append((float(t0), float(alpha)))
    pts.sort()
    cuts = [a] + [t for t, _ in pts if a < t < b] + [b]
    cuts = sorted(set(cuts))
    sing = {t: al for t, al in pts}
    segs = []
    for lo, hi in zip(cuts[:-1], cuts[1:]):
        if hi <= lo:
            continue
        al_lo = sing.get(lo, 0.0)
        al_hi = sing.get(hi, 0.0)
        if al_lo > 0.0 and al_hi > 0.0:
            mid = 0.5 * (lo + hi)
            segs.append(_make_seg(lo, mid, al_lo, "left"))
            segs.append(_make_seg(mid, hi, al_hi, "right"))
        elif al_lo > 0.0:
            segs.append(_make_seg(lo, hi, al_lo, "left"))
        elif al_hi > 0.0:
            segs.append(_make_seg(lo, hi, al_hi, "right"))
        else:
            segs.append(_Segment(hi - lo, "id", lo))
    return segs


def _make_seg(lo, hi, alpha, side):
    length = hi - lo
    p = 1.0 / (1.0 - alpha)
    span = length ** (1.0 - alpha)
    anchor = lo if side == "left" else hi
    return _Segment(span, side, anchor, power=p)


def _map_panels(panels):
    """Vectorized node/Jacobian construction for (seg, u0, u1) panels.

    Returns (T, JAC, HALF): node matrix (P, 15), Jacobians, half-widths.
    """
    p = len(panels)
    u0 = np.array([q[-2] for q in panels])
    u1 = np.array([q[-1] for q in panels])
    mid = 0.5 * (u0 + u1)
    half = 0.5 * (u1 - u0)
    u = mid[:, None] + half[:, None] * _XK
    t = np.empty_like(u)
    jac = np.ones_like(u)
    kinds = np.array([0 if q[-3].kind == "id" else (1 if q[-3].kind == "left" else 2) for q in panels])
    anchor = np.array([q[-3].t_anchor for q in panels])
    sel = kinds == 0
    if np.any(sel):
        t[sel] = anchor[sel, None] + u[sel]
    sel = kinds > 0
    if np.any(sel):
        power = np.array([q[-3].power for q in panels])[sel, None]
        dmin = np.array([q[-3].delta_min for q in panels])[sel, None]
        up = np.maximum(u[sel] ** power, dmin)
        jac[sel] = power * u[sel] ** (power - 1.0)
        left = (kinds == 1)[sel]
        tt = np.where(left[:, None], anchor[sel, None] + up, anchor[sel, None] - up)
        t[sel] = tt
    return t, jac, half


def _reduce_panels(vals, jac, half):
    """Kronrod/Gauss reductions for a (P, 15) value matrix."""
    v = vals * jac
    k15 = half * (v @ _WK)
    g7 = half * (v[:, _GAUSS_IDX] @ _WG)
    resabs = half * (np.abs(v) @ _WK)
    err = np.abs(k15 - g7)
    return k15, err, resabs


def _eval_panels(f, panels):
    """Evaluate Kronrod/Gauss sums for a batch of (seg, u0, u1) panels.

    Returns (k15, |k15 - g7|, integral of |f|) per panel.
    """
    t, jac, half = _map_panels(panels)
    vals = np.asarray(f(t.ravel())).reshape(t.shape)
    k15, err, resabs = _reduce_panels(vals, jac, half)
    return list(zip(k15, err, resabs))


def quad_1d(
    f,
    interval,
    cfg: QuadratureConfig = DEFAULT_CONFIG,
    singularities=(),
    seed_panels=1,
):
    """Globally adaptive Gauss-Kronrod integration on a finite interval.

    Parameters
    ----------
    f : callable
        Vectorized integrand, float array -> (complex) array.  Never
        evaluated at interval endpoints or at declared singular points.
    interval : (a, b)
    singularities : iterable of (t0, alpha)
        Integrable singularities |t - t0|^(-alpha) with alpha < 1.  Points
        outside [a, b] are ignored; alpha >= 1 raises
        NonIntegrableSingularity.
    seed_panels : int
        Initial equal panels per segment; a handful lets smooth
        integrands converge in a single batched evaluation.

    Returns
    -------
    (value, err_est) : complex, float
    """
    a, b = float(interval[0]), float(interval[1])
    if a == b:
        return 0.0 + 0.0j, 0.0
    sign = 1.0
    if b < a:
        a, b, sign = b, a, -1.0
    segs = _build_segments(a, b, singularities)

    counter = itertools.count()
    heap = []
    total_val = 0.0 + 0.0j
    total_err = 0.0
    total_abs = 0.0
    n_panels = 0

    def refinable(seg, u0, u1):
        width = u1 - u0
        if width <= 1e-15 * max(1e-300, abs(u0) + abs(u1)):
            return False
        return u1 > seg.u_floor

    seed = []
    for seg in segs:
        edges = np.linspace(0.0, seg.span, max(1, int(seed_panels)) + 1)
        seed.extend((seg, lo, hi) for lo, hi in zip(edges[:-1], edges[1:]))
    for (seg, u0, u1), (val, err, resabs) in zip(seed, _eval_panels(f, seed)):
        heapq.heappush(heap, (-err, next(counter), seg, u0, u1, val, err, resabs))
        total_val += val
        total_err += err
        total_abs += resabs
        n_panels += 1

    while True:
        # the last term is the roundoff floor: heavy cancellation cannot
        # be resolved below ~eps times the integral of |f|
        tol = max(
            cfg.abs_tol,
            cfg.rel_tol * abs(total_val),
            50.0 * np.finfo(float).eps * total_abs,
        )
        if total_err <= tol:
            break
        if not heap:
            raise MaxSubdivisionsExceeded(
                f"resolution limit, err={total_err:.3e} > tol={tol:.3e}"
            )
        if n_panels >= cfg.max_subdivisions:
            raise MaxSubdivisionsExceeded(
                f"{n_panels} panels, err={total_err:.3e} > tol={tol:.3e}"
            )
        children = []
        popped_any = False
        err_lead = None
        for _ in range(min(8, len(heap))):
            if err_lead is not None and heap and -heap[0][0] < 0.25 * err_lead:
                break  # remaining panels contribute little; split lazily
            neg_err, _, seg, u0, u1, val, err, resabs = heapq.heappop(heap)
            if not refinable(seg, u0, u1):
                # contribution and error stay in the totals; panel is
                # simply no longer a refinement candidate
                continue
            if err_lead is None:
                err_lead = err
            popped_any = True
            total_val -= val
            total_err -= err
            total_abs -= resabs
            um = 0.5 * (u0 + u1)
            um = max(um, seg.u_floor) if seg.u_floor > u0 else um
            children.append((seg, u0, um))
            children.append((seg, um, u1))
        if not popped_any:
            if not heap:
                raise MaxSubdivisionsExceeded(
                    f"resolution limit, err={total_err:.3e} > tol={tol:.3e}"
                )
            continue
        for (seg, u0, u1), (val, err, resabs) in zip(children, _eval_panels(f, children)):
            heapq.heappush(heap, (-err, next(counter), seg, u0, u1, val, err, resabs))
            total_val += val
            total_err += err
            total_abs += resabs
            n_panels += 1

    return sign * total_val, total_err


def _quad_many(eval_batch, jobs, cfg: QuadratureConfig, seed_panels=3):
    """Many adaptive Gauss-Kronrod quads in lockstep.

    jobs is a list of segment lists (one quad per job); eval_batch takes
    (job_indices, t_values) for a flat batch of nodes spanning several
    jobs and panels, and returns integrand values.  All jobs advance
    together so the integrand is only ever called on large batches.

    Returns (values, errors) arrays.
    """
    njobs = len(jobs)
    values = np.zeros(njobs, dtype=complex)
    errors = np.zeros(njobs)
    resabs = np.zeros(njobs)
    heaps = [[] for _ in range(njobs)]
    counter = itertools.count()
    panel_counts = np.zeros(njobs, dtype=int)

    def eval_many(panel_list):
        # panel_list: (job, seg, u0, u1); one flat integrand call
        t, jac, half = _map_panels(panel_list)
        jidx = np.repeat(np.array([q[0] for q in panel_list]), 15)
        vals = np.asarray(eval_batch(jidx, t.ravel())).reshape(t.shape)
        k15, err, resabs = _reduce_panels(vals, jac, half)
        return list(zip(k15, err, resabs))

    seed = []
    for job, segs in enumerate(jobs):
        for seg in segs:
            step = seg.span / seed_panels
            seed.extend(
                (job, seg, i * step, (i + 1) * step) for i in range(seed_panels)
            )
    for (job, seg, u0, u1), (val, err, ra) in zip(seed, eval_many(seed)):
        heapq.heappush(heaps[job], (-err, next(counter), seg, u0, u1, val, err, ra))
        values[job] += val
        errors[job] += err
        resabs[job] += ra
        panel_counts[job] += 1

    eps = np.finfo(float).eps
    while True:
        tols = np.maximum(
            cfg.abs_tol,
            np.maximum(cfg.rel_tol * np.abs(values), 50.0 * eps * resabs),
        )
        live = np.nonzero(errors > tols)[0]
        if live.size == 0:
            break
        children = []
        for job in live:
            if not heaps[job]:
                raise MaxSubdivisionsExceeded(
                    f"job {job}: resolution limit, err={errors[job]:.3e}"
                )
            if panel_counts[job] >= cfg.max_subdivisions:
                raise MaxSubdivisionsExceeded(
                    f"job {job}: {panel_counts[job]} panels, err={errors[job]:.3e}"
                )
            # split enough panels to cover most of the excess error mass
            need = errors[job] - 0.4 * tols[job]
            taken = 0.0
            for _ in range(min(32, len(heaps[job]))):
                if taken >= 0.85 * need:
                    break
                neg_err, _, seg, u0, u1, val, err, ra = heapq.heappop(heaps[job])
                width = u1 - u0
                if width <= 1e-15 * max(1e-300, abs(u0) + abs(u1)) or u1 <= seg.u_floor:
                    continue
                taken += err
                values[job] -= val
                errors[job] -= err
                resabs[job] -= ra
                um = 0.5 * (u0 + u1)
                um = max(um, seg.u_floor) if seg.u_floor > u0 else um
                children.append((job, seg, u0, um))
                children.append((job, seg, um, u1))
                panel_counts[job] += 2
        if not children:
            break
        for (job, seg, u0, u1), (val, err, ra) in zip(children, eval_many(children)):
            heapq.heappush(heaps[job], (-err, next(counter), seg, u0, u1, val, err, ra))
            values[job] += val
            errors[job] += err
            resabs[job] += ra

    return values, errors


def quad_nd(
    f,
    box,
    cfg: QuadratureConfig = DEFAULT_CONFIG,
    singular_hyperplane=None,
    support_ball=None,
):
    """Nested adaptive integration over a product of intervals (n <= 4).

    ``singular_hyperplane`` is an optional (normal, offset, alpha) triple
    declaring an integrable singularity |normal . x - offset|^(-alpha),
    alpha < 1.  The dimension with the largest |normal| component is
    integrated innermost so the singular locus is a known point of each
    inner 1-d integral.

    ``support_ball`` declares that the integrand vanishes outside the
    origin-centered ball of that radius; each nested interval is then
    clipped to the ball section, which saves a large fraction of the
    evaluations for shell-supported integrands.

    Returns (value, err_est).
    """
    box = [(float(lo), float(hi)) for lo, hi in box]
    n = len(box)
    if n > 4:
        raise DimensionTooLarge(f"quad_nd supports n <= 4, got {n}")
    if n == 0:
        raise ValueError("empty box")
    ball2 = None if support_ball is None else float(support_ball) ** 2

    normal = offset = None
    alpha = 0.0
    if singular_hyperplane is not None:
        normal, offset, alpha = singular_hyperplane
        normal = np.asarray(normal, dtype=float)
        if alpha >= 1.0:
            raise NonIntegrableSingularity(f"hyperplane exponent alpha={alpha} >= 1")

    def clip(d, coords):
        """Box interval of dimension d clipped to the remaining ball section."""
        lo, hi = box[d]
        if ball2 is None:
            return lo, hi
        rem = ball2 - sum(c * c for c in coords)
        if rem <= 0.0:
            return 0.0, 0.0
        w = rem**0.5
        return max(lo, -w), min(hi, w)

    if n == 1:
        sing = []
        if normal is not None and normal[0] != 0.0 and alpha > 0.0:
            sing = [(offset / normal[0], alpha)]
        lo, hi = clip(0, ())
        return quad_1d(lambda t: f(t[:, None]), (lo, hi), cfg, singularities=sing)

    if normal is not None:
        inner = int(np.argmax(np.abs(normal)))
    else:
        inner = n - 1
    outer_dims = [d for d in range(n) if d != inner]

    # probe the integrand magnitude once; nested levels cannot resolve
    # integrals below roundoff relative to this scale, so they get an
    # absolute floor (otherwise lines through the fringe of a compactly
    # supported integrand grind forever on relative tolerance)
    grids = [np.linspace(lo, hi, 7)[1:-1] for lo, hi in box]
    lattice = np.stack([g.ravel() for g in np.meshgrid(*grids)], axis=-1)
    with np.errstate(all="ignore"):
        probe = np.abs(np.asarray(f(lattice)))
    probe = probe[np.isfinite(probe)]
    fscale = float(np.max(probe)) if probe.size and np.max(probe) > 0 else 1.0

    # absolute floor for nested levels: contributions this far below the
    # integrand scale cannot affect the outer result at the requested
    # relative tolerance, so grinding them down is pure waste
    floor_coef = max(1e-15, 1e-5 * cfg.rel_tol)
    tighten_by_depth = (1.0, 0.1, 0.03, 0.01)

    def level_cfg(depth_measure, tighten):
        # deeper levels run tighter so their noise does not stall the
        # error estimates of the level above
        return QuadratureConfig(
            abs_tol=max(
                cfg.abs_tol / max(1.0, _box_measure(box, skip=None)),
                floor_coef * fscale * depth_measure,
            ),
            rel_tol=max(cfg.rel_tol * tighten, 1e-13),
            max_subdivisions=cfg.max_subdivisions,
            mc_samples=cfg.mc_samples,
            rng_seed=cfg.rng_seed,
        )

    lo_in, hi_in = box[inner]
    inner_cfg = level_cfg(hi_in - lo_in, tighten_by_depth[n - 1])
    inner_err_peak = [0.0]

    def inner_batch(fixed, ts):
        """Innermost integrals for a whole batch of middle nodes, lockstep."""
        jobs = []
        jmap = []
        ts_sel = []
        for i, t in enumerate(ts):
            coords = fixed + (t,)
            lo, hi = clip(inner, coords)
            if hi - lo <= 0.0:
                continue
            sing = []
            if normal is not None:
                rest = sum(normal[d] * c for d, c in zip(outer_dims, coords))
                t0 = (offset - rest) / normal[inner]
                if lo <= t0 <= hi:
                    sing = [(t0, alpha)]
            jobs.append(_build_segments(lo, hi, sing))
            jmap.append(i)
            ts_sel.append(t)
        out = np.zeros(ts.shape[0], dtype=complex)
        if not jobs:
            return out
        ts_sel = np.asarray(ts_sel)

        def eval_batch(jidx, tt):
            x = np.empty((tt.size, n))
            for pos, d in enumerate(outer_dims[:-1]):
                x[:, d] = fixed[pos]
            x[:, outer_dims[-1]] = ts_sel[jidx]
            x[:, inner] = tt
            return f(x)

        vals, errs = _quad_many(eval_batch, jobs, inner_cfg, seed_panels=INNER_SEED_PANELS)
        inner_err_peak[0] = max(inner_err_peak[0], float(np.max(errs)) if errs.size else 0.0)
        out[jmap] = vals
        return out

    def level(k, fixed):
        d = outer_dims[k]
        last = k == len(outer_dims) - 1

        if last:
            def integrand(ts):
                return inner_batch(fixed, ts)
        else:
            def integrand(ts):
                out = np.empty(ts.shape[0], dtype=complex)
                for i, t in enumerate(ts):
                    out[i] = level(k + 1, fixed + (t,))[0]
                return out

        if k == 0:
            lvl_cfg = cfg
        else:
            depth = hi_in - lo_in
            for dd in outer_dims[k + 1 :]:
                depth *= box[dd][1] - box[dd][0]
            lvl_cfg = level_cfg(depth, tighten_by_depth[len(outer_dims) - k])
        lo, hi = clip(d, fixed)
        return quad_1d(integrand, (lo, hi), lvl_cfg, seed_panels=OUTER_SEED_PANELS)

    val, outer_err = level(0, ())
    measure = _box_measure(box, skip=inner)
    return val, outer_err + inner_err_peak[0] * measure


def _box_measure(box, skip):
    m = 1.0
    for i, (lo, hi) in enumerate(box):
        if i == skip:
            continue
        m *= hi - lo
    return m


def sphere_mc(f, d, cfg: QuadratureConfig = DEFAULT_CONFIG, stream=0):
    """Monte Carlo average of f over the unit sphere S^(d-1).

    The surface measure is normalized to total mass 1; points are
    Gaussian directions from a counter-based Philox generator, so the
    result is a pure function of (cfg.rng_seed, stream).

    Returns (estimate, std_err).
    """
    if d < 2:
        raise ValueError("need d >= 2")
    bitgen = np.random.Philox(key=cfg.rng_seed).jumped(stream)
    rng = np.random.Generator(bitgen)
    n = cfg.mc_samples
    chunk = 1 << 18
    acc = 0.0 + 0.0j
    acc2 = 0.0
    done = 0
    while done < n:
        m = min(chunk, n - done)
        g = rng.standard_normal((m, d))
        norms = np.sqrt(np.sum(g * g, axis=1))
        norms = np.maximum(norms, 1e-300)
        vals = np.asarray(f(g / norms[:, None]), dtype=complex)
        acc += vals.sum()
        acc2 += float(np.sum(vals.real**2 + vals.imag**2))
        done += m
    mean = acc / n
    var = max(acc2 / n - abs(mean) ** 2, 0.0)
    if n > 1:
        var *= n / (n - 1.0)
    std_err = float(np.sqrt(var / n))
    if abs(mean.imag) == 0.0:
        return mean.real, std_err
    return mean, std_err
