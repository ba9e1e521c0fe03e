"""Exact, Monte-Carlo, and brute-force worst-case regret machinery.

The regret of a policy pi against an out-of-sample measure mu, given that
its input was generated under nu, is |opt(mu) - G(pi(nu) | mu)|.  This
module evaluates it exactly on finite measures, estimates it by seeded
Monte-Carlo over heterogeneous sample draws, scans small measure grids for
a certified lower bound on the worst case, and builds the named adversarial
instances whose regret admits closed-form targets, together with the
matching analytic lower/upper bound pairs.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .measures import FiniteMeasure, _from_canonical, make_finite_measure
from .metrics import BALL_SLACK, DistanceKind, distance, in_ball
from .policies import PolicyKind, PolicySpec, apply_policy, recommended_parameter
from .problems import (
    ProblemKind,
    ProblemSpec,
    expected_objective,
    expected_objective_grid,
    objective,
    opt_value,
    oracle,
)

Z95 = 1.959963984540054  # two-sided 95% normal quantile


class UnknownName(ValueError):
    pass


class EpsTooLarge(ValueError):
    pass


class InvalidBRange(ValueError):
    pass


class GridTooLarge(ValueError):
    pass


class NoAnalyticBound(ValueError):
    pass


@dataclass(frozen=True)
class AdversarialPair:
    """A named (mu, nu_1..nu_n) construction with its analytic target.

    ``mu`` is the out-of-sample measure, ``nus`` the historical ones (length
    one unless the construction needs per-sample heterogeneity).  Every nu is
    verified to lie in the eps-ball around mu at construction time.  For
    policy-failure instances ``cited_policy`` is the policy whose exact
    regret equals ``target``; for two-point-prior lower bounds it is None
    and ``target`` is the fixed-action minimax value over {mu, nus[0]}.
    """

    name: str
    problem: ProblemSpec
    mu: FiniteMeasure
    nus: tuple[FiniteMeasure, ...]
    kind: DistanceKind
    eps: float
    target: float | None = None
    target_note: str = ""
    cited_policy: PolicySpec | None = None

    def __post_init__(self) -> None:
        for nu in self.nus:
            if not in_ball(self.mu, nu, self.kind, self.eps):
                raise ValueError(
                    f"{self.name}: historical measure leaves the {self.kind.value} "
                    f"ball of radius {self.eps}"
                )


@dataclass(frozen=True)
class RegretReport:
    estimate: float
    ci_half_width: float = 0.0
    analytic_lower: float | None = None
    analytic_upper: float | None = None
    witness: AdversarialPair | None = None
    n: int = 0
    trials: int = 0
    seed: int = 0

    def __post_init__(self) -> None:
        if self.estimate < -self.ci_half_width:
            raise ValueError("regret estimate below -ci_half_width")
        if (
            self.analytic_lower is not None
            and self.analytic_upper is not None
            and self.analytic_lower > self.analytic_upper + 1e-12
        ):
            raise ValueError("analytic lower bound exceeds upper bound")


# ---------------------------------------------------------------------------
# regret evaluation


def exact_regret(
    p: ProblemSpec, pol: PolicySpec, mu: FiniteMeasure, nu: FiniteMeasure
) -> float:
    """|opt(mu) - G(pi(nu) | mu)| computed exactly on the atoms."""
    action = apply_policy(pol, p, nu)
    return abs(opt_value(p, mu) - expected_objective(p, action, mu))


def exhaustive_regret_n2(
    p: ProblemSpec,
    pol: PolicySpec,
    mu: FiniteMeasure,
    nu1: FiniteMeasure,
    nu2: FiniteMeasure,
) -> float:
    """Exact two-sample regret: the product-measure expectation over

    (xi_1, xi_2) ~ nu1 x nu2 of |opt(mu) - G(pi(empirical) | mu)|.
    """
    opt_mu = opt_value(p, mu)
    total = []
    for x1, w1 in zip(nu1.support, nu1.weights):
        for x2, w2 in zip(nu2.support, nu2.weights):
            m_hat = make_finite_measure([x1, x2], [0.5, 0.5], mu.upper)
            action = apply_policy(pol, p, m_hat)
            total.append(w1 * w2 * abs(opt_mu - expected_objective(p, action, mu)))
    return math.fsum(total)


def monte_carlo_regret(
    p: ProblemSpec,
    pol: PolicySpec,
    mu: FiniteMeasure,
    nus: list[FiniteMeasure] | tuple[FiniteMeasure, ...],
    trials: int,
    seed: int,
) -> RegretReport:
    """Average |opt(mu) - G(pi(mu_hat) | mu)| over seeded draws.

    Each trial draws one sample from every nu_i, forms the empirical measure,
    and applies the policy.  Trial t uses the generator seeded by (seed, t),
    so results are independent of how trials are scheduled.
    """
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    n = len(nus)
    if n < 1:
        raise ValueError("need at least one historical measure")
    opt_mu = opt_value(p, mu)

    union = sorted({pt for nu in nus for pt in nu.support})
    union_arr = np.asarray(union)
    index_of = {pt: i for i, pt in enumerate(union)}
    # group identical historical measures so each group samples in one shot
    columns_of: dict[tuple, list[int]] = {}
    for i, nu in enumerate(nus):
        columns_of.setdefault((nu.support, nu.weights), []).append(i)
    plans = [
        (
            np.cumsum(wts),
            np.asarray([index_of[pt] for pt in sup]),
            np.asarray(cols),
        )
        for (sup, wts), cols in columns_of.items()
    ]

    regrets = np.empty(trials)
    for t in range(trials):
        rng = np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(t,)))
        u = rng.random(n)
        sample_idx = np.empty(n, dtype=np.int64)
        for cum, idx_map, cols in plans:
            k = np.minimum(np.searchsorted(cum, u[cols], side="right"), len(idx_map) - 1)
            sample_idx[cols] = idx_map[k]
        counts = np.bincount(sample_idx, minlength=len(union))
        nz = counts > 0
        m_hat = _from_canonical(
            union_arr[nz].tolist(), (counts[nz] / n).tolist(), mu.upper
        )
        action = apply_policy(pol, p, m_hat)
        regrets[t] = abs(opt_mu - expected_objective(p, action, mu))

    estimate = float(regrets.mean())
    ci = 0.0
    if trials > 1:
        ci = float(Z95 * regrets.std(ddof=1) / math.sqrt(trials))
    return RegretReport(estimate=estimate, ci_half_width=ci, n=n, trials=trials, seed=seed)


def fixed_action_minimax(
    p: ProblemSpec, measures: list[FiniteMeasure] | tuple[FiniteMeasure, ...], n_grid: int = 1001
) -> tuple[float, float]:
    """min over a fixed-action grid of the average regret against a uniform
    prior over ``measures``; returns (value, minimizing action).

    This is the two-point-prior lower-bound scheme: any data-driven policy,
    having seen samples from a measure lying in every candidate's ball, does
    no better than the best fixed action against the prior.
    """
    xs = np.linspace(0.0, p.M, n_grid)
    total = np.zeros(n_grid)
    for m in measures:
        total += np.abs(opt_value(p, m) - expected_objective_grid(p, xs, m))
    total /= len(measures)
    j = int(np.argmin(total))
    return float(total[j]), float(xs[j])


# ---------------------------------------------------------------------------
# named constructions


def ski_indifference_measure(M: int, b: int) -> FiniteMeasure:
    """The integer-support measure making every rental duration cost-equal.

    Tails satisfy P(xi >= k) = (b/(b-1)) * P(xi >= k+1) for k = 1..M-b-1 with
    boundary P(xi >= M-b) = (b/(b-1)) * nu(M), no mass at 0 or in
    {M-b+1..M-1}, so actions {0..M-b-1} and M all cost exactly b and the mean
    is b.
    """
    if M != int(M) or b != int(b):
        raise InvalidBRange("M and b must be integers")
    M, b = int(M), int(b)
    if not (2 <= b <= M - 1):
        raise InvalidBRange(f"need 2 <= b <= M-1, got b={b}, M={M}")
    r = (b - 1) / b
    tails = {k: r ** (k - 1) for k in range(1, M - b + 1)}
    tail_M = r ** (M - b)  # = nu(M); constant tail across the gap
    pts, wts = [], []
    for k in range(1, M - b):
        pts.append(float(k))
        wts.append(tails[k] - tails[k + 1])
    pts.append(float(M - b))
    wts.append(tails[M - b] - tail_M)
    pts.append(float(M))
    wts.append(tail_M)
    return make_finite_measure(pts, wts, float(M))


def _two_point(p0: float, w0: float, p1: float, w1: float, upper: float) -> FiniteMeasure:
    return make_finite_measure([p0, p1], [w0, w1], upper)


def _build_nv_tv_pair(params: dict) -> AdversarialPair:
    c_u = float(params.get("c_u", 1.0))
    c_o = float(params.get("c_o", 1.0))
    M = float(params.get("M", 1.0))
    eps = float(params["eps"])
    kind = params.get("kind", DistanceKind.TOTAL_VARIATION)
    problem = ProblemSpec.newsvendor(c_u, c_o, M)
    q = problem.critical_fractile
    # eps is the ball radius in the requested distance; for two-point
    # measures on {0, M} the Wasserstein distance is M times the mass shift.
    shift = eps / M if kind is DistanceKind.WASSERSTEIN else eps
    if not (0.0 < shift <= min(q, 1.0 - q)):
        raise EpsTooLarge(
            f"need mass shift in (0, min(q, 1-q) = {min(q, 1 - q)}], got {shift}"
        )
    center = _two_point(0.0, q, M, 1.0 - q, M)
    mu_plus = _two_point(0.0, q - shift, M, 1.0 - q + shift, M)
    return AdversarialPair(
        name="nv_tv_pair",
        problem=problem,
        mu=mu_plus,
        nus=(center,),
        kind=kind,
        eps=eps,
        target=(c_u + c_o) * M * shift,
        target_note="exact SAA regret on the witness",
        cited_policy=PolicySpec.saa(),
    )


def _build_pr_k_pair(params: dict) -> AdversarialPair:
    M = float(params.get("M", 1.0))
    eps = float(params["eps"])
    kind = params.get("kind", DistanceKind.KOLMOGOROV)
    if kind is DistanceKind.WASSERSTEIN:
        raise ValueError("pr_k_pair is a Kolmogorov/total-variation construction")
    if not (0.0 < eps <= 0.5):
        raise EpsTooLarge(f"need 0 < eps <= 1/2, got {eps}")
    center = _two_point(M / 2, 0.5, M, 0.5, M)
    mu_plus = _two_point(M / 2, 0.5 - eps, M, 0.5 + eps, M)
    return AdversarialPair(
        name="pr_k_pair",
        problem=ProblemSpec.pricing(M),
        mu=mu_plus,
        nus=(center,),
        kind=kind,
        eps=eps,
        target=M * eps,
        target_note="exact SAA regret on the witness",
        cited_policy=PolicySpec.saa(),
    )


def _build_pr_w_saa_fail(params: dict) -> AdversarialPair:
    M = float(params.get("M", 1.0))
    eps = float(params["eps"])
    eta = float(params.get("eta", 1e-3))
    if not 0.0 < eta < M:
        raise ValueError(f"need 0 < eta < M, got eta={eta}")
    if eps <= 0.0:
        raise EpsTooLarge(f"need eps > 0, got {eps}")
    mu = make_finite_measure([M - eta], [1.0], M)
    nu = make_finite_measure([min(M, M - eta + eps)], [1.0], M)
    return AdversarialPair(
        name="pr_w_saa_fail",
        problem=ProblemSpec.pricing(M),
        mu=mu,
        nus=(nu,),
        kind=DistanceKind.WASSERSTEIN,
        eps=eps,
        target=M - eta,
        target_note="exact SAA regret: the posted price overshoots every value",
        cited_policy=PolicySpec.saa(),
    )


def _build_pr_w_lower(params: dict) -> AdversarialPair:
    M = float(params.get("M", 1.0))
    eps = float(params["eps"])
    if not (0.0 < eps <= M / 4.0):
        raise EpsTooLarge(f"need 0 < eps <= M/4 = {M / 4}, got {eps}")
    w = 2.0 * math.sqrt(eps / M)
    shift = math.sqrt(M * eps) / 2.0
    nu = make_finite_measure([M / 2], [1.0], M)
    mu = make_finite_measure([M / 2 - shift, M / 2], [w, 1.0 - w], M)
    return AdversarialPair(
        name="pr_w_lower",
        problem=ProblemSpec.pricing(M),
        mu=mu,
        nus=(nu,),
        kind=DistanceKind.WASSERSTEIN,
        eps=eps,
        target=math.sqrt(M * eps) / 4.0,
        target_note="fixed-action minimax lower bound over {mu, nu}",
        cited_policy=None,
    )


def _build_ski_k_saa_fail(params: dict) -> AdversarialPair:
    M = int(params.get("M", 10))
    b = int(params.get("b", 3))
    eps = float(params["eps"])
    alpha = float(params.get("alpha", eps / 2.0))
    kind = params.get("kind", DistanceKind.TOTAL_VARIATION)
    nu = ski_indifference_measure(M, b)
    nu_weight = dict(zip(nu.support, nu.weights))
    if not (0.0 < eps <= nu_weight[1.0]):
        raise EpsTooLarge(f"need 0 < eps <= nu(1) = {nu_weight[1.0]}, got {eps}")
    if not (0.0 <= alpha <= eps):
        raise EpsTooLarge(f"need 0 <= alpha <= eps, got alpha={alpha}")
    if alpha > nu_weight[float(M)]:
        raise EpsTooLarge(f"need alpha <= nu(M) = {nu_weight[float(M)]}")

    # nu_alpha: move alpha mass from M down to 0, so renting one more day is
    # strictly preferred at every step and SAA never buys.
    def shifted(extra: dict[float, float]) -> FiniteMeasure:
        wts = dict(nu_weight)
        for pt, dw in extra.items():
            wts[pt] = wts.get(pt, 0.0) + dw
        pts = sorted(wts)
        return make_finite_measure(pts, [wts[pt] for pt in pts], float(M))

    nu_alpha = shifted({0.0: alpha, float(M): -alpha})
    # mu: additionally move eps mass from day 1 to M, so never buying loses
    # roughly eps * M against buying immediately.
    mu = shifted({0.0: alpha, float(M): -alpha + eps, 1.0: -eps})
    target = eps * (M - 1) - alpha * (M - b)
    return AdversarialPair(
        name="ski_k_saa_fail",
        problem=ProblemSpec.ski_rental(b, M),
        mu=mu,
        nus=(nu_alpha,),
        kind=kind,
        eps=eps,
        target=target,
        target_note="exact SAA regret in the known-historical-distribution limit",
        cited_policy=PolicySpec.saa(),
    )


def _build_ski_k_lower(params: dict) -> AdversarialPair:
    b = float(params.get("b", 1.0))
    eps = float(params["eps"])
    M = float(params.get("M", 2.0 * b))
    kind = params.get("kind", DistanceKind.TOTAL_VARIATION)
    if b < 1.0:
        raise InvalidBRange(f"need b >= 1, got {b}")
    if not (0.0 < eps <= 0.5):
        raise EpsTooLarge(f"need 0 < eps <= 1/2, got {eps}")
    if M < 1.25 * b:
        raise ValueError(f"need M >= 5b/4, got M={M}")
    nu = _two_point(0.75 * b, 0.5 + eps / 2, 1.25 * b, 0.5 - eps / 2, M)
    mu = _two_point(0.75 * b, 0.5 - eps / 2, 1.25 * b, 0.5 + eps / 2, M)
    return AdversarialPair(
        name="ski_k_lower",
        problem=ProblemSpec.ski_rental(b, M),
        mu=mu,
        nus=(nu,),
        kind=kind,
        eps=eps,
        target=eps * b / 8.0,
        target_note="fixed-action minimax lower bound over {mu, nu}",
        cited_policy=None,
    )


def _build_ski_w_saa_fail(params: dict) -> AdversarialPair:
    b = float(params.get("b", 2.0))
    M = float(params.get("M", 10.0))
    eps = float(params["eps"])
    if M <= 2.0 * b:
        raise ValueError(f"need M > 2b, got M={M}, b={b}")
    if not (0.0 < eps < b / 4.0):
        raise EpsTooLarge(f"need 0 < eps < b/4 = {b / 4}, got {eps}")
    nu = _two_point(b / 2, 0.75, M, 0.25, M)
    mu = _two_point(b / 2 + eps, 0.75, M, 0.25, M)
    return AdversarialPair(
        name="ski_w_saa_fail",
        problem=ProblemSpec.ski_rental(b, M),
        mu=mu,
        nus=(nu,),
        kind=DistanceKind.WASSERSTEIN,
        eps=eps,
        target=0.75 * b - eps,
        target_note="exact SAA regret: buying lands one day before the trip ends",
        cited_policy=PolicySpec.saa(),
    )


def _build_ski_w_lower(params: dict) -> AdversarialPair:
    b = float(params.get("b", 1.0))
    M = float(params.get("M", 4.0 * b))
    eps = float(params["eps"])
    if b < 1.0:
        raise InvalidBRange(f"need b >= 1, got {b}")
    if not (0.0 < eps <= b / 4.0):
        raise EpsTooLarge(f"need 0 < eps <= b/4 = {b / 4}, got {eps}")
    if M < 2.0 * b:
        raise ValueError(f"need M >= 2b, got M={M}")
    s = math.sqrt(b * eps)
    t = math.sqrt(eps / b)
    nu = _two_point(b / 2 - s / 2, 0.5, M, 0.5, M)
    mu = make_finite_measure(
        [b / 2 - s / 2, b / 2 + s / 2, M], [0.5 - t, t, 0.5], M
    )
    return AdversarialPair(
        name="ski_w_lower",
        problem=ProblemSpec.ski_rental(b, M),
        mu=mu,
        nus=(nu,),
        kind=DistanceKind.WASSERSTEIN,
        eps=eps,
        target=s / 4.0,
        target_note="fixed-action minimax lower bound over {mu, nu}",
        cited_policy=None,
    )


def _build_hetero_helps(params: dict) -> AdversarialPair:
    k = int(params["k"])
    if k < 1:
        raise ValueError(f"need k >= 1, got {k}")
    b = 2 * k + 1
    M = 3 * k + 2
    delta = lambda pt: make_finite_measure([float(pt)], [1.0], float(M))
    return AdversarialPair(
        name="hetero_helps",
        problem=ProblemSpec.ski_rental(b, M),
        mu=delta(k + 1),
        nus=(delta(k), delta(3 * k + 2)),
        kind=DistanceKind.TOTAL_VARIATION,
        eps=1.0,
        target=2.0 * k,
        target_note="exact two-sample SAA regret with heterogeneous histories",
        cited_policy=PolicySpec.saa(),
    )


_FAMILIES = {
    "nv_tv_pair": _build_nv_tv_pair,
    "pr_k_pair": _build_pr_k_pair,
    "pr_w_saa_fail": _build_pr_w_saa_fail,
    "pr_w_lower": _build_pr_w_lower,
    "ski_k_saa_fail": _build_ski_k_saa_fail,
    "ski_k_lower": _build_ski_k_lower,
    "ski_w_saa_fail": _build_ski_w_saa_fail,
    "ski_w_lower": _build_ski_w_lower,
    "hetero_helps": _build_hetero_helps,
}


def adversarial_instance(name: str, params: dict) -> AdversarialPair:
    """Build a named adversarial construction; see _FAMILIES for the list.

    Raises UnknownName, or EpsTooLarge when eps violates the construction's
    validity condition (outside it the measures would not be measures or the
    target formula would not hold).
    """
    if name not in _FAMILIES:
        raise UnknownName(f"unknown adversarial family {name!r}")
    try:
        return _FAMILIES[name](dict(params))
    except KeyError as exc:
        raise ValueError(f"family {name!r} requires parameter {exc.args[0]!r}") from exc


def evaluate_pair(
    pair: AdversarialPair, pol: PolicySpec | None = None, n_grid: int = 1001
) -> float:
    """The quantity the pair certifies.

    Policy-failure pairs: exact regret of the cited (or given) policy, with
    the exact two-sample expectation when the history is heterogeneous.
    Minimax pairs: the fixed-action minimax value over {mu, nu}.
    """
    if pair.cited_policy is None and pol is None:
        value, _ = fixed_action_minimax(pair.problem, (pair.mu,) + pair.nus, n_grid)
        return value
    policy = pol if pol is not None else pair.cited_policy
    if len(pair.nus) == 2:
        return exhaustive_regret_n2(pair.problem, policy, pair.mu, pair.nus[0], pair.nus[1])
    return exact_regret(pair.problem, policy, pair.mu, pair.nus[0])


# ---------------------------------------------------------------------------
# brute-force DRO scan


@dataclass(frozen=True)
class ScanGrid:
    """Measure grid for worst-case scans: all measures whose atoms sit on
    ``locations`` with at most ``max_atoms`` of them carrying weight, and
    weights that are multiples of 1/weight_resolution."""

    locations: tuple[float, ...]
    weight_resolution: int
    max_atoms: int = 4
    max_pairs: int = 10_000_000

    def __post_init__(self) -> None:
        if not (1 <= self.max_atoms <= 4):
            raise ValueError("max_atoms must be between 1 and 4")
        if self.weight_resolution < 1:
            raise ValueError("weight_resolution must be >= 1")
        if len(self.locations) < 1 or list(self.locations) != sorted(set(self.locations)):
            raise ValueError("locations must be sorted and distinct")


def enumerate_grid_measures(grid: ScanGrid, upper: float) -> list[FiniteMeasure]:
    """All grid measures on [0, upper], in a fixed deterministic order."""
    locs = grid.locations
    if locs[0] < 0.0 or locs[-1] > upper:
        raise ValueError(f"grid locations must lie in [0, {upper}]")
    res = grid.weight_resolution
    out = []
    for a in range(1, min(grid.max_atoms, len(locs)) + 1):
        for subset in itertools.combinations(range(len(locs)), a):
            for cuts in itertools.combinations(range(1, res), a - 1):
                bounds = (0,) + cuts + (res,)
                counts = [bounds[i + 1] - bounds[i] for i in range(a)]
                out.append(
                    make_finite_measure(
                        [locs[j] for j in subset], [c / res for c in counts], upper
                    )
                )
    return out


def _weights_matrix(measures: list[FiniteMeasure], locs: tuple[float, ...]) -> np.ndarray:
    col = {pt: j for j, pt in enumerate(locs)}
    W = np.zeros((len(measures), len(locs)))
    for i, m in enumerate(measures):
        for pt, w in zip(m.support, m.weights):
            W[i, col[pt]] = w
    return W


def _distance_block(
    kind: DistanceKind,
    Wb: np.ndarray,
    cumWb: np.ndarray,
    W: np.ndarray,
    cumW: np.ndarray,
    gaps: np.ndarray,
) -> np.ndarray:
    if kind is DistanceKind.KOLMOGOROV:
        return np.abs(cumWb[:, None, :] - cumW[None, :, :]).max(axis=2)
    if kind is DistanceKind.TOTAL_VARIATION:
        return 0.5 * np.abs(Wb[:, None, :] - W[None, :, :]).sum(axis=2)
    return (np.abs(cumWb[:, None, :] - cumW[None, :, :]) * gaps[None, None, :]).sum(axis=2)


def dro_regret_scan(
    p: ProblemSpec,
    pol: PolicySpec,
    kind: DistanceKind,
    eps: float,
    grid: ScanGrid,
    block: int = 128,
) -> RegretReport:
    """Maximize the exact regret over all grid pairs (mu, nu) with nu in the
    eps-ball of mu.  The result is a certified lower bound on the worst-case
    regret; paired with the analytic upper bound it forms a sandwich.
    """
    if eps < 0.0:
        raise ValueError(f"eps must be >= 0, got {eps}")
    measures = enumerate_grid_measures(grid, p.M)
    n = len(measures)
    if n * n > grid.max_pairs:
        raise GridTooLarge(f"{n * n} pairs exceed the cap {grid.max_pairs}")

    locs = np.asarray(grid.locations)
    W = _weights_matrix(measures, grid.locations)
    cumW = np.cumsum(W, axis=1)
    gaps = np.append(np.diff(locs), p.M - locs[-1])

    # Evaluate both the policy actions and the oracle actions through the
    # same vectorized arithmetic, so SAA on the truth is exactly zero.
    actions = [apply_policy(pol, p, m) for m in measures]
    oracle_actions = [oracle(p, m) for m in measures]
    distinct = sorted(set(actions) | set(oracle_actions))
    col = {a: j for j, a in enumerate(distinct)}
    a_idx = np.asarray([col[a] for a in actions])
    g_at_locs = np.stack(
        [np.asarray([objective(p, a, pt) for pt in grid.locations]) for a in distinct]
    )
    GA = W @ g_at_locs.T  # (n_measures, n_distinct_actions)
    opts = GA[np.arange(n), [col[a] for a in oracle_actions]]

    best = 0.0
    best_pair: tuple[int, int] | None = None
    for start in range(0, n, block):
        stop = min(start + block, n)
        D = _distance_block(kind, W[start:stop], cumW[start:stop], W, cumW, gaps)
        R = np.abs(opts[start:stop, None] - GA[start:stop][:, a_idx])
        R[D > eps + BALL_SLACK] = -1.0
        j = np.unravel_index(np.argmax(R), R.shape)
        if R[j] > best:
            best = float(R[j])
            best_pair = (start + int(j[0]), int(j[1]))

    witness = None
    if best_pair is not None:
        i, j = best_pair
        witness = AdversarialPair(
            name="scan_witness",
            problem=p,
            mu=measures[i],
            nus=(measures[j],),
            kind=kind,
            eps=eps,
            target=None,
            target_note="argmax of the grid scan",
            cited_policy=pol,
        )
    lo, hi = bounds_for_policy(p, kind, pol, eps)
    return RegretReport(
        estimate=best,
        ci_half_width=0.0,
        analytic_lower=lo,
        analytic_upper=hi,
        witness=witness,
    )


# ---------------------------------------------------------------------------
# analytic bounds


def analytic_bounds(
    p: ProblemSpec, kind: DistanceKind, pol_kind: str, eps: float
) -> tuple[float, float]:
    """Closed-form (lower, upper) asymptotic worst-case regret for the cell.

    pol_kind is 'saa' or 'best'.  Total-variation upper bounds reuse the
    Kolmogorov ones (regret under TV is dominated by regret under K at the
    same radius).  Raises EpsTooLarge outside the validity range of the
    underlying statement and NoAnalyticBound for an unknown cell.
    """
    if pol_kind not in ("saa", "best"):
        raise NoAnalyticBound(f"unknown policy kind {pol_kind!r}")
    if eps <= 0.0:
        raise EpsTooLarge(f"bounds need eps > 0, got {eps}")
    kv = kind.value
    if p.kind is ProblemKind.NEWSVENDOR:
        q = p.critical_fractile
        cap = min(q, 1 - q) if kind is not DistanceKind.WASSERSTEIN else p.M * min(q, 1 - q)
        if eps > cap:
            raise EpsTooLarge(f"newsvendor/{kv} bounds need eps <= {cap}")
        scale = 1.0 if kind is DistanceKind.WASSERSTEIN else p.M
        return (
            0.5 * (p.c_u + p.c_o) * scale * eps,
            2.0 * max(p.c_u, p.c_o) * scale * eps,
        )
    if p.kind is ProblemKind.PRICING:
        if kind is not DistanceKind.WASSERSTEIN:
            if eps > 0.5:
                raise EpsTooLarge(f"pricing/{kv} bounds need eps <= 1/2")
            return 0.5 * p.M * eps, 2.0 * p.M * eps
        if pol_kind == "saa":
            return p.M, p.M
        if eps > p.M / 4.0:
            raise EpsTooLarge(f"pricing/wasserstein best bounds need eps <= M/4")
        return math.sqrt(p.M * eps) / 4.0, 4.0 * math.sqrt(p.M * eps)
    # ski rental
    if kind is not DistanceKind.WASSERSTEIN:
        if eps > 0.5:
            raise EpsTooLarge(f"ski/{kv} bounds need eps <= 1/2")
        if pol_kind == "saa":
            return p.M * eps, 2.0 * (p.M + p.b) * eps
        if p.b < 1.0:
            raise NoAnalyticBound("ski capped-policy bounds assume b >= 1")
        if p.b * math.log(1.0 / eps) > p.M:
            raise EpsTooLarge("capped-policy bound needs b*ln(1/eps) <= M")
        return eps * p.b / 8.0, p.b * (math.log(1.0 / eps) + 2.0) * eps
    if pol_kind == "saa":
        if p.M <= 2.0 * p.b or eps >= p.b / 4.0:
            raise EpsTooLarge("ski/wasserstein SAA bounds need M > 2b and eps < b/4")
        return p.b / 2.0, 2.0 * (p.b + eps)
    if p.b < 1.0 or eps > p.b / 4.0 or p.M < 2.0 * p.b:
        raise EpsTooLarge("ski/wasserstein best bounds need b >= 1, eps <= b/4, M >= 2b")
    return math.sqrt(p.b * eps) / 4.0, 4.0 * math.sqrt(p.b * eps) + 2.0 * eps


def bounds_for_policy(
    p: ProblemSpec, kind: DistanceKind, pol: PolicySpec, eps: float
) -> tuple[float | None, float | None]:
    """Bounds cell matching a concrete policy, or (None, None).

    SAA maps to the 'saa' cell; a policy equal to the recommended
    robustification for (problem, kind, eps) maps to 'best'; anything else
    has no cited bound.
    """
    try:
        if pol.kind is PolicyKind.SAA:
            return analytic_bounds(p, kind, "saa", eps)
        rec = recommended_parameter(p, kind, eps)
        if rec.kind is pol.kind and (
            (pol.kind is PolicyKind.DELTA_SAA and abs(pol.delta - rec.delta) <= 1e-12)
            or (pol.kind is PolicyKind.CAPPED and abs(pol.cap - rec.cap) <= 1e-12)
        ):
            return analytic_bounds(p, kind, "best", eps)
    except (EpsTooLarge, NoAnalyticBound, ValueError):
        return None, None
    return None, None


# ---------------------------------------------------------------------------
# two-sample heterogeneity comparison


def _integer_saa_action(
    samples: tuple[float, ...], b: float, xs: list[float], prefer_largest: bool
) -> float:
    """Empirical-cost argmin over an explicit action grid.

    The three-point ski variant resolves oracle ties by renting as long as
    possible, so its comparison sweep uses prefer_largest=True.
    """
    best_x, best_c = xs[0], math.inf
    for x in xs:
        c = math.fsum(
            (xi if xi <= x else b + x) for xi in samples
        ) / len(samples)
        if c < best_c or (prefer_largest and c == best_c):
            best_x, best_c = x, c
    return best_x


def hetero_helps_homogeneous_max(k: int, resolution: int = 50) -> float:
    """Best two-sample SAA regret achievable with a single historical
    distribution on the three-point ski variant, against mu = point mass at
    k+1 (the worst out-of-sample measure of the heterogeneous construction).

    Sweeps all weight vectors of the given resolution on {k, k+1, 3k+2}.
    The heterogeneous pair (delta_k, delta_{3k+2}) forces the uniquely bad
    action k with probability one; no single distribution can, so this max
    stays strictly below 2k.
    """
    if k < 1:
        raise ValueError(f"need k >= 1, got {k}")
    b = 2 * k + 1
    M = 3 * k + 2
    atoms = [float(k), float(k + 1), float(M)]
    xs = [float(x) for x in range(M + 1)]

    action_of = {}
    for i, j in itertools.combinations_with_replacement(range(3), 2):
        action_of[(i, j)] = _integer_saa_action(
            (atoms[i], atoms[j]), b, xs, prefer_largest=True
        )

    def g(x: float, xi: float) -> float:
        return xi if xi <= x else b + x

    mu_atom = atoms[1]  # k + 1
    opt_mu = min(g(x, mu_atom) for x in xs)

    best = 0.0
    r = resolution
    for i in range(r + 1):
        for j in range(r + 1 - i):
            w = (i / r, j / r, (r - i - j) / r)
            value = 0.0
            for (ia, ja), act in action_of.items():
                prob = w[ia] * w[ja] * (1.0 if ia == ja else 2.0)
                value += prob * (g(act, mu_atom) - opt_mu)
            best = max(best, value)
    return best
