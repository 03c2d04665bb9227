"""Energy-efficiency maximization.

Coordinate ascent over (training surplus, antenna ratio, transmit antennas)
with golden-section inner searches, plus an exhaustive integer lattice
search used as the global-optimum oracle.
"""

from dataclasses import dataclass, field

import numpy as np

from .analytic import PowerModel, _ee_value
from .errors import BracketingFailure, EmptyFeasibleSet, InfeasibleInterval, InvalidConfig

INV_GOLDEN = (np.sqrt(5.0) - 1.0) / 2.0

BETA_HARD_CAP = 2.0**16


@dataclass(frozen=True)
class EeContext:
    """Everything the objective needs besides the three decision variables."""

    snr: float
    impairment: float
    coherence: int
    power: PowerModel

    def ee(self, n_t, beta, t_a) -> float:
        return float(_ee_value(n_t, beta, t_a, self.snr, self.impairment,
                               self.coherence, self.power))


@dataclass(frozen=True)
class OptimizerSettings:
    ee_threshold: float = 1e-10     # bits/Joule; outer-loop convergence
    max_outer_iters: int = 50
    line_search_tol: float = 1e-6   # relative bracket width
    beta_upper: float = 64.0        # initial cap, auto-expanded

    def __post_init__(self):
        if self.ee_threshold <= 0 or self.max_outer_iters < 1:
            raise InvalidConfig("ee_threshold and max_outer_iters must be positive")
        if self.beta_upper <= 1.0 + self.line_search_tol:
            raise InvalidConfig("beta_upper must exceed 1 + line_search_tol")


@dataclass
class OptimizationResult:
    t_p_star: int
    t_a_star: float
    n_t_star: int
    beta_star: float
    n_r_star: int
    ee_star: float
    trace: list = field(default_factory=list)   # (iteration, parameter, ee)
    converged: bool = True
    # continuous-relaxation solution before integer refinement
    relaxed_n_t: float = 0.0
    relaxed_beta: float = 0.0
    relaxed_t_a: float = 0.0
    relaxed_ee: float = 0.0

    @property
    def iterations(self) -> int:
        return max((it for it, _, _ in self.trace), default=0)


def golden_section_max(f, a: float, b: float, tol: float) -> float:
    """Maximizer of a unimodal f on [a, b] to within tol * initial width.

    Monotone functions converge to the matching boundary. Degenerate
    brackets return the midpoint.
    """
    if b < a:
        raise InfeasibleInterval(f"empty interval [{a}, {b}]")
    width_target = tol * max(b - a, 1.0)
    c = b - INV_GOLDEN * (b - a)
    d = a + INV_GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    while b - a > width_target:
        if fc < fd:
            a, c, fc = c, d, fd
            d = a + INV_GOLDEN * (b - a)
            fd = f(d)
        else:
            b, d, fd = d, c, fc
            c = b - INV_GOLDEN * (b - a)
            fc = f(c)
    return 0.5 * (a + b)


def optimize_ta(n_t: float, beta: float, ctx: EeContext, settings: OptimizerSettings) -> float:
    """Best training surplus for fixed antenna numbers (objective is concave)."""
    hi = ctx.coherence - n_t
    if hi < 0:
        raise InfeasibleInterval(f"n_t={n_t} exceeds coherence {ctx.coherence}")
    return golden_section_max(lambda t_a: ctx.ee(n_t, beta, t_a), 0.0, hi,
                              settings.line_search_tol)


def optimize_beta(n_t: float, t_a: float, ctx: EeContext, settings: OptimizerSettings) -> float:
    """Best antenna ratio for fixed n_t and training surplus (quasiconcave).

    The objective vanishes at both ends of (1, inf), so an interior maximum
    exists whenever the receive chains cost power; the upper bracket is
    doubled until the endpoint value drops below the midpoint value.
    """
    lo = 1.0 + 1e-9
    hi = max(settings.beta_upper, lo * 2)
    while ctx.ee(n_t, hi, t_a) >= ctx.ee(n_t, 0.5 * (lo + hi), t_a):
        hi *= 2.0
        if hi > BETA_HARD_CAP:
            raise BracketingFailure(
                "no interior maximum in beta below 2^16; "
                "check that the power model charges for receive chains"
            )
    return golden_section_max(lambda b: ctx.ee(n_t, b, t_a), lo, hi,
                              settings.line_search_tol)


def optimize_nt(beta: float, t_a: float, ctx: EeContext, settings: OptimizerSettings) -> float:
    """Best transmit antenna count for fixed ratio and training surplus.

    The objective is unimodal up to (T - t_a)/2 and decreasing beyond, so
    searching the first region finds the global maximizer.
    """
    hi = 0.5 * (ctx.coherence - t_a)
    if hi < 1.0:
        if ctx.coherence - t_a >= 1.0:
            return 1.0
        raise InfeasibleInterval(f"no feasible n_t for t_a={t_a}")
    return golden_section_max(lambda n: ctx.ee(n, beta, t_a), 1.0, hi,
                              settings.line_search_tol)


def _integer_refine(ctx: EeContext, n_t: float, beta: float, t_a: float):
    """Best feasible integer neighbor of the relaxed solution.

    Ties break toward the lexicographically smallest (n_t, n_r, t_p).
    """
    best = None
    for nt_i in sorted({int(np.floor(n_t)), int(np.ceil(n_t))}):
        if nt_i < 1:
            continue
        for ta_i in sorted({int(np.floor(t_a)), int(np.ceil(t_a))}):
            if ta_i < 0 or nt_i + ta_i > ctx.coherence:
                continue
            target_nr = beta * nt_i
            for nr_i in sorted({int(np.floor(target_nr)), int(np.ceil(target_nr))}):
                nr_i = max(nr_i, nt_i + 1)
                ee = ctx.ee(nt_i, nr_i / nt_i, ta_i)
                key = (ee, -nt_i, -nr_i, -(nt_i + ta_i))
                if best is None or key > best[0]:
                    best = (key, nt_i, nr_i, ta_i, ee)
    _, nt_i, nr_i, ta_i, ee = best
    return nt_i, nr_i, ta_i, ee


def iterate(settings: OptimizerSettings, initial, ctx: EeContext) -> OptimizationResult:
    """Sequential coordinate maximization of the energy efficiency.

    ``initial`` is a feasible (t_a, beta, n_t) triple. Each coordinate update
    is accepted only if it improves the objective, so the recorded trace is
    nondecreasing; the loop stops once a full cycle improves by less than
    ``ee_threshold``.
    """
    t_a, beta, n_t = (float(v) for v in initial)
    ee = ctx.ee(n_t, beta, t_a)
    trace = [(0, "init", ee)]
    converged = False
    for it in range(1, settings.max_outer_iters + 1):
        ee_prev = ee

        cand = optimize_ta(n_t, beta, ctx, settings)
        if ctx.ee(n_t, beta, cand) > ee:
            t_a, ee = cand, ctx.ee(n_t, beta, cand)
        trace.append((it, "t_a", ee))

        cand = optimize_beta(n_t, t_a, ctx, settings)
        if ctx.ee(n_t, cand, t_a) > ee:
            beta, ee = cand, ctx.ee(n_t, cand, t_a)
        trace.append((it, "beta", ee))

        cand = optimize_nt(beta, t_a, ctx, settings)
        if cand + t_a <= ctx.coherence and ctx.ee(cand, beta, t_a) > ee:
            n_t, ee = cand, ctx.ee(cand, beta, t_a)
        trace.append((it, "n_t", ee))

        if ee - ee_prev < settings.ee_threshold:
            converged = True
            break

    nt_i, nr_i, ta_i, ee_int = _integer_refine(ctx, n_t, beta, t_a)
    return OptimizationResult(
        t_p_star=nt_i + ta_i,
        t_a_star=float(ta_i),
        n_t_star=nt_i,
        beta_star=nr_i / nt_i,
        n_r_star=nr_i,
        ee_star=ee_int,
        trace=trace,
        converged=converged,
        relaxed_n_t=n_t,
        relaxed_beta=beta,
        relaxed_t_a=t_a,
        relaxed_ee=ee,
    )


def default_initial(ctx: EeContext):
    """Feasible starting triple (t_a, beta, n_t)."""
    return (ctx.coherence / 10.0, 2.0, min(8.0, ctx.coherence / 2.0))


def grid_search(ctx: EeContext, nt_max: int, nr_max: int, tp_max: int) -> OptimizationResult:
    """Exhaustive search over the integer lattice; the global-optimum oracle.

    Evaluates every (n_t, n_r, t_p) with n_r > n_t and n_t <= t_p <= T.
    The loop over n_t keeps peak memory at one (n_r, t_p) plane.
    """
    tp_max = min(tp_max, ctx.coherence)
    if nt_max < 1 or nr_max < 2 or tp_max < 1:
        raise EmptyFeasibleSet("lattice bounds admit no feasible point")
    nr = np.arange(2, nr_max + 1)[:, None]
    tp = np.arange(1, tp_max + 1)[None, :]

    best_ee = -np.inf
    best = None
    for nt in range(1, min(nt_max, tp_max, nr_max - 1) + 1):
        feasible = (nr > nt) & (tp >= nt)
        # infeasible points evaluate log2 of nonpositive arguments; they are
        # masked out immediately, so suppress the spurious warnings
        with np.errstate(invalid="ignore", divide="ignore"):
            ee = _ee_value(nt, nr / nt, tp - nt, ctx.snr, ctx.impairment,
                           ctx.coherence, ctx.power)
        ee = np.where(feasible, ee, -np.inf)
        idx = np.unravel_index(np.argmax(ee), ee.shape)
        if ee[idx] > best_ee:
            best_ee = float(ee[idx])
            best = (nt, int(nr[idx[0], 0]), int(tp[0, idx[1]]))
    if best is None or not np.isfinite(best_ee):
        raise EmptyFeasibleSet("no feasible lattice point")
    nt_b, nr_b, tp_b = best
    return OptimizationResult(
        t_p_star=tp_b,
        t_a_star=float(tp_b - nt_b),
        n_t_star=nt_b,
        beta_star=nr_b / nt_b,
        n_r_star=nr_b,
        ee_star=best_ee,
        trace=[(1, "grid", best_ee)],
        converged=True,
        relaxed_n_t=float(nt_b),
        relaxed_beta=nr_b / nt_b,
        relaxed_t_a=float(tp_b - nt_b),
        relaxed_ee=best_ee,
    )
