"""Adaptive quadrature with Cauchy principal-value support.

One-dimensional integrals use a globally adaptive Gauss-Kronrod 7/15 scheme:
the worst panel (largest Gauss-vs-Kronrod discrepancy) is bisected until the
summed error estimate meets tolerance or the subdivision budget runs out.

Principal values are computed by symmetric excision.  For each interior pole p
a shrinking sequence of half-widths eps_0 > eps_1 > ... is excised; the two
panels flanking the pole are folded into a single integral of
f(p+t) + f(p-t), which cancels the simple-pole divergence analytically, and
the partial results are extrapolated to eps -> 0 with a Neville tableau.
For a simple pole the excision error is an odd power series in eps, so the
extrapolation converges far faster than the raw sequence.

Multi-dimensional integrals (n = 2, 3) are iterated one-dimensional integrals;
a direction flagged periodic uses an equal-weight rule with point doubling and
falls back to the adaptive scheme if the integrand is not smooth enough.

Integrands are called with numpy arrays of abscissae; plain scalar callables
are detected and looped over transparently.  Non-finite integrand values at
isolated nodes are treated as zero (integrable endpoint singularities).
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np

__all__ = [
    "QuadratureConfig",
    "IntegrationResult",
    "NonConvergenceError",
    "PoleOnBoundaryError",
    "PoleSeparationError",
    "integrate_1d",
    "pv_integrate_1d",
    "integrate_nd",
    "require_converged",
]


def _default_excision_sequence() -> tuple[float, ...]:
    # geometric, ratio 1/2, 12 terms
    return tuple(0.5 ** k for k in range(1, 13))


@dataclass(frozen=True)
class QuadratureConfig:
    """Tolerances and budgets shared by all integration routines.

    excision_sequence entries are dimensionless shrink factors: for each pole
    they are rescaled so that the first (largest) entry maps to half of the
    pole's safe half-width (distance to the nearest boundary or to the
    midpoint toward a neighbouring pole).  Only the ratios matter.
    """

    rel_tol: float = 1e-10
    abs_tol: float = 1e-14
    max_subdivisions: int = 4096
    excision_sequence: tuple[float, ...] = field(
        default_factory=_default_excision_sequence
    )

    def __post_init__(self) -> None:
        if not (self.rel_tol > 0.0 and self.abs_tol > 0.0):
            raise ValueError("tolerances must be positive")
        if self.max_subdivisions < 1:
            raise ValueError("max_subdivisions must be >= 1")
        seq = tuple(float(e) for e in self.excision_sequence)
        if len(seq) < 3:
            raise ValueError("excision_sequence needs at least 3 entries")
        if any(e <= 0.0 for e in seq):
            raise ValueError("excision_sequence entries must be > 0")
        if any(b >= a for a, b in zip(seq, seq[1:])):
            raise ValueError("excision_sequence must be strictly decreasing")
        object.__setattr__(self, "excision_sequence", seq)

    def tolerance(self, value: float) -> float:
        return max(self.abs_tol, self.rel_tol * abs(value))


@dataclass(frozen=True)
class IntegrationResult:
    value: float
    error_estimate: float
    evaluations: int
    converged: bool


class NonConvergenceError(RuntimeError):
    """Raised by callers that require a converged estimate and did not get one."""


class PoleOnBoundaryError(ValueError):
    """A principal-value pole coincides with an integration endpoint."""


class PoleSeparationError(ValueError):
    """Two poles are too close for independent symmetric excision."""


def require_converged(res: IntegrationResult, what: str = "integral") -> IntegrationResult:
    if not res.converged:
        raise NonConvergenceError(
            f"{what} did not converge: value={res.value:.6g} "
            f"error={res.error_estimate:.3g} after {res.evaluations} evaluations"
        )
    return res


# Gauss-Kronrod 7/15 nodes and weights on [-1, 1].  The 7-point Gauss rule is
# embedded at the odd-index nodes.
_XK = np.array([
    -0.991455371120813, -0.949107912342759, -0.864864423359769,
    -0.741531185599394, -0.586087235467691, -0.405845151377397,
    -0.207784955007898, 0.0, 0.207784955007898, 0.405845151377397,
    0.586087235467691, 0.741531185599394, 0.864864423359769,
    0.949107912342759, 0.991455371120813,
])
_WK = np.array([
    0.022935322010529, 0.063092092629979, 0.104790010322250,
    0.140653259715525, 0.169004726639267, 0.190350578064785,
    0.204432940075298, 0.209482141084728, 0.204432940075298,
    0.190350578064785, 0.169004726639267, 0.140653259715525,
    0.104790010322250, 0.063092092629979, 0.022935322010529,
])
_WG = np.array([
    0.129484966168870, 0.279705391489277, 0.381830050505119,
    0.417959183673469, 0.381830050505119, 0.279705391489277,
    0.129484966168870,
])


class _Integrand:
    """Wraps a user callable: batched evaluation, scalar fallback, eval count."""

    def __init__(self, f: Callable):
        self.f = f
        self.evaluations = 0
        self._vectorized: bool | None = None

    def __call__(self, x: np.ndarray) -> np.ndarray:
        self.evaluations += x.size
        if self._vectorized is None or self._vectorized:
            try:
                with np.errstate(all="ignore"):
                    y = np.asarray(self.f(x), dtype=float)
                if y.shape == x.shape:
                    self._vectorized = True
                    return self._finite(y)
                if y.ndim == 0:
                    self._vectorized = True
                    return self._finite(np.full(x.shape, float(y)))
            except (TypeError, ValueError, IndexError):
                pass
            self._vectorized = False
        with np.errstate(all="ignore"):
            y = np.array([float(self.f(float(xi))) for xi in x])
        return self._finite(y)

    @staticmethod
    def _finite(y: np.ndarray) -> np.ndarray:
        # isolated non-finite node values (integrable singularities) -> 0
        return np.where(np.isfinite(y), y, 0.0)


def _panels(F: _Integrand, edges: np.ndarray) -> list[tuple[float, float, float, float]]:
    """Evaluate Gauss-Kronrod on each [edges[i], edges[i+1]] in one batch."""
    los, his = edges[:-1], edges[1:]
    mid = 0.5 * (los + his)
    half = 0.5 * (his - los)
    nodes = (mid[:, None] + half[:, None] * _XK[None, :]).ravel()
    y = F(nodes).reshape(len(los), _XK.size)
    vals = half * (y @ _WK)
    errs = np.abs(vals - half * (y[:, 1::2] @ _WG))
    return [
        (float(lo), float(hi), float(v), float(e))
        for lo, hi, v, e in zip(los, his, vals, errs)
    ]


def integrate_1d(
    f: Callable,
    a: float,
    b: float,
    cfg: QuadratureConfig | None = None,
    *,
    breakpoints: Sequence[float] | None = None,
) -> IntegrationResult:
    """Adaptive integral of f over [a, b].

    breakpoints seeds the initial mesh (e.g. graded toward a known endpoint
    singularity); adaptivity refines from there.  Never raises on a hard
    integrand: the best estimate is returned with converged=False.
    """
    cfg = cfg or QuadratureConfig()
    a, b = float(a), float(b)
    if not (math.isfinite(a) and math.isfinite(b)):
        raise ValueError("integration bounds must be finite")
    if a == b:
        return IntegrationResult(0.0, 0.0, 0, True)
    if a > b:
        raise ValueError("requires a < b")

    F = _Integrand(f)
    edges = [a, b]
    if breakpoints:
        edges += [float(p) for p in breakpoints if a < p < b]
    panels = _panels(F, np.array(sorted(set(edges))))

    heap: list[tuple[float, int, float, float, float, float]] = []
    tick = 0
    for lo, hi, v, e in panels:
        heap.append((-e, tick, lo, hi, v, e))
        tick += 1
    heapq.heapify(heap)
    frozen: list[tuple[float, float]] = []  # (value, error) of unsplittable panels

    splits = 0
    converged = False
    while True:
        total_v = math.fsum(h[4] for h in heap) + math.fsum(v for v, _ in frozen)
        total_e = math.fsum(h[5] for h in heap) + math.fsum(e for _, e in frozen)
        if total_e <= cfg.tolerance(total_v):
            converged = True
            break
        if splits >= cfg.max_subdivisions or not heap:
            break
        _, _, lo, hi, v, e = heapq.heappop(heap)
        width_floor = 8.0 * np.finfo(float).eps * max(abs(lo), abs(hi), 1.0)
        if hi - lo <= width_floor or e == 0.0:
            frozen.append((v, e))
            continue
        mid = 0.5 * (lo + hi)
        for plo, phi, pv, pe in _panels(F, np.array([lo, mid, hi])):
            heapq.heappush(heap, (-pe, tick, plo, phi, pv, pe))
            tick += 1
        splits += 1

    value = math.fsum(h[4] for h in heap) + math.fsum(v for v, _ in frozen)
    err = math.fsum(h[5] for h in heap) + math.fsum(e for _, e in frozen)
    return IntegrationResult(value, err, F.evaluations, converged)


def _neville_to_zero(xs: np.ndarray, ys: np.ndarray) -> tuple[float, float]:
    """Polynomial extrapolation of (xs, ys) to x = 0.

    Returns the diagonal entry with the smallest last correction, so noise in
    late columns (quadrature round-off) does not spoil the estimate.
    """
    n = len(xs)
    p = [float(y) for y in ys]
    best = p[0]
    best_corr = math.inf
    prev = p[0]
    for k in range(1, n):
        for i in range(n - k):
            p[i] = (xs[i + k] * p[i] - xs[i] * p[i + 1]) / (xs[i + k] - xs[i])
        corr = abs(p[0] - prev)
        if corr < best_corr:
            best_corr = corr
            best = p[0]
        prev = p[0]
    if not math.isfinite(best_corr):
        best_corr = 0.0
    return best, best_corr


def pv_integrate_1d(
    f: Callable,
    a: float,
    b: float,
    poles: Sequence[float],
    cfg: QuadratureConfig | None = None,
) -> IntegrationResult:
    """Cauchy principal value of f over [a, b] with simple poles inside.

    Poles listed outside [a, b] are ignored.  A pole within floating distance
    of an endpoint raises PoleOnBoundaryError; poles too close to each other
    for independent excision raise PoleSeparationError.
    """
    cfg = cfg or QuadratureConfig()
    a, b = float(a), float(b)
    if a >= b:
        raise ValueError("requires a < b")
    btol = 1e-12 * (b - a)
    interior = []
    for p in sorted(float(p) for p in poles):
        if abs(p - a) <= btol or abs(p - b) <= btol:
            raise PoleOnBoundaryError(
                f"pole at {p!r} lies on an integration boundary of [{a}, {b}]"
            )
        if a < p < b:
            interior.append(p)
    if len(interior) != len(set(interior)):
        raise PoleSeparationError("duplicate pole locations")
    if not interior:
        return integrate_1d(f, a, b, cfg)

    seq = np.asarray(cfg.excision_sequence)
    shrink = seq / seq[0]  # normalised: shrink[0] == 1
    gaps = [math.inf]
    if len(interior) > 1:
        gaps = [q - p for p, q in zip(interior, interior[1:])]
    min_gap = min(gaps)

    eps: list[np.ndarray] = []
    for i, p in enumerate(interior):
        room = min(p - a, b - p)
        if len(interior) > 1:
            left_gap = interior[i] - interior[i - 1] if i > 0 else math.inf
            right_gap = interior[i + 1] - interior[i] if i < len(interior) - 1 else math.inf
            room = min(room, 0.5 * min(left_gap, right_gap))
        eps.append(0.5 * 0.5 * room * shrink)  # largest excision = room/4

    if len(interior) > 1 and min_gap <= 4.0 * min(e[-1] for e in eps):
        raise PoleSeparationError(
            f"pole separation {min_gap:.3g} is below four smallest excision half-widths"
        )

    # sub-integrals must be much tighter than the requested PV tolerance,
    # otherwise their accumulated noise dominates the final estimate
    piece_cfg = replace(
        cfg,
        rel_tol=max(cfg.rel_tol * 1e-3, 4.0 * np.finfo(float).eps),
        abs_tol=cfg.abs_tol * 1e-2,
    )

    F = _Integrand(f)
    evaluations = 0
    piece_err = 0.0
    all_ok = True

    def run(g: Callable, lo: float, hi: float, sub_cfg: QuadratureConfig) -> float:
        nonlocal evaluations, piece_err, all_ok
        res = integrate_1d(g, lo, hi, sub_cfg)
        evaluations += res.evaluations
        piece_err += res.error_estimate
        all_ok = all_ok and res.converged
        return res.value

    # region outside the largest excisions
    edges = [a]
    for p, e in zip(interior, eps):
        edges += [p - e[0], p + e[0]]
    edges.append(b)
    base = math.fsum(
        run(F, lo, hi, piece_cfg) for lo, hi in zip(edges[::2], edges[1::2])
    )

    # shells between consecutive excision radii, symmetrised about each pole.
    # The symmetrised integrand is a difference of two near-singular values,
    # so its achievable absolute accuracy is bounded by machine epsilon times
    # the magnitude of the cancelling terms; the shell tolerance honours that.
    n_stage = len(seq)
    shells = np.zeros((len(interior), n_stage))  # shells[:,0] stays zero
    for i, (p, e) in enumerate(zip(interior, eps)):
        sym = lambda t, _p=p: F(_p + t) + F(_p - t)
        for k in range(1, n_stage):
            probe = np.array([p - e[k - 1], p - e[k], p + e[k], p + e[k - 1]])
            mag = float(np.max(np.abs(F(probe))))
            floor = 64.0 * np.finfo(float).eps * mag * (e[k - 1] - e[k])
            shell_cfg = replace(piece_cfg, abs_tol=max(piece_cfg.abs_tol, floor))
            shells[i, k] = run(sym, e[k], e[k - 1], shell_cfg)

    stage_vals = base + np.cumsum(shells.sum(axis=0))
    value, extrap_err = _neville_to_zero(shrink, stage_vals)
    err = extrap_err + piece_err
    converged = all_ok and err <= cfg.tolerance(value)
    return IntegrationResult(value, err, evaluations, converged)


def _integrate_periodic(
    f: Callable, a: float, b: float, cfg: QuadratureConfig, n_max: int = 1024
) -> IntegrationResult:
    """Equal-weight rule over one period with point doubling.

    Spectrally accurate for smooth periodic integrands; falls back to the
    adaptive scheme when doubling stalls (kinked integrands).
    """
    F = _Integrand(f)
    h = (b - a) / 8.0
    x = a + h * np.arange(8)
    total = float(F(x).sum())
    value = h * total
    n = 8
    err = math.inf
    while n < n_max:
        xnew = a + (b - a) * (np.arange(n) + 0.5) / n
        total += float(F(xnew).sum())
        n *= 2
        h = (b - a) / n
        new_value = h * total
        err = abs(new_value - value)
        value = new_value
        if n >= 32 and err <= cfg.tolerance(value):
            return IntegrationResult(value, err, F.evaluations, True)
    fallback = integrate_1d(f, a, b, cfg)
    return IntegrationResult(
        fallback.value,
        fallback.error_estimate,
        F.evaluations + fallback.evaluations,
        fallback.converged,
    )


def integrate_nd(
    f: Callable,
    box: Sequence[tuple[float, float]],
    cfg: QuadratureConfig | None = None,
    *,
    periodic: Sequence[bool] | None = None,
) -> IntegrationResult:
    """Iterated adaptive integral over an n-box, n in {2, 3}.

    f is called as f(x0, ..., x_{n-1}) with the innermost coordinate batched
    as an array (scalar callables are looped).  Dimensions flagged in
    `periodic` use the equal-weight periodic rule.  Integrable logarithmic
    singularities on lower-dimensional sets are acceptable: the adaptive
    refinement grades the mesh around them.
    """
    cfg = cfg or QuadratureConfig()
    n = len(box)
    if n not in (2, 3):
        raise ValueError("integrate_nd supports n = 2 or 3")
    per = list(periodic) if periodic is not None else [False] * n
    if len(per) != n:
        raise ValueError("periodic flag list must match box dimension")

    evals = [0]
    inner_errs: list[float] = []
    inner_ok = [True]
    # deeper levels run tighter so their noise stays below the outer estimate
    cfgs = [
        replace(cfg, rel_tol=cfg.rel_tol * 0.1 ** lvl, abs_tol=cfg.abs_tol * 0.1 ** lvl)
        for lvl in range(n)
    ]

    def level_integral(level: int, fixed: tuple[float, ...]) -> IntegrationResult:
        lo, hi = box[level]
        if level == n - 1:
            def g(t):
                return f(*fixed, t)
            res = (
                _integrate_periodic(g, lo, hi, cfgs[level])
                if per[level]
                else integrate_1d(g, lo, hi, cfgs[level])
            )
            evals[0] += res.evaluations
            inner_errs.append(res.error_estimate)
            inner_ok[0] = inner_ok[0] and res.converged
            return res

        def g(x):
            xs = np.atleast_1d(np.asarray(x, dtype=float))
            out = np.array(
                [level_integral(level + 1, fixed + (float(xi),)).value for xi in xs]
            )
            return out if np.ndim(x) else float(out[0])

        return (
            _integrate_periodic(g, lo, hi, cfgs[level])
            if per[level]
            else integrate_1d(g, lo, hi, cfgs[level])
        )

    top = level_integral(0, ())
    outer_measure = 1.0
    for lo, hi in box[:-1]:
        outer_measure *= hi - lo
    mean_inner = sum(inner_errs) / len(inner_errs) if inner_errs else 0.0
    err = top.error_estimate + mean_inner * outer_measure
    converged = top.converged and inner_ok[0] and err <= cfg.tolerance(top.value)
    return IntegrationResult(top.value, err, evals[0], converged)
