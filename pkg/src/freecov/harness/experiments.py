"""Experiment runners behind the CLI subcommands.

Each runner returns a :class:`Report`; ``report.ok`` is False when a check
breaches its tolerance.  Configuration problems raise :class:`ConfigError`.
"""

from __future__ import annotations

import math
import time
from fractions import Fraction
from functools import lru_cache
from itertools import chain, combinations
from typing import Sequence

import numpy as np

from .. import freemoments, graphcover
from ..ensembles import EnsembleSpec, Kind, derive_rng, estimate_l4_constant, hypothesis_report, predicted_cumulants
from ..partitions import SetPartition, is_noncrossing
from ..spectra import mc_moments, partition_contribution
from .config import ConfigError, ExperimentConfig
from .reports import Report, environment_metadata

__all__ = [
    "HypothesisViolation",
    "stirling2",
    "binomial_moment",
    "run_convergence",
    "run_counterexample",
    "run_crossing_decay",
    "run_lemma_suite",
    "run_hypotheses",
    "predict",
    "within_tolerance",
]

P_MAX_PREDICT = 12


class HypothesisViolation(ConfigError):
    """The ensemble breaks the marginal fourth-moment hypothesis."""

    def __init__(self, message: str, diagnostic: dict):
        super().__init__(message)
        self.diagnostic = diagnostic


@lru_cache(maxsize=None)
def stirling2(p: int, k: int) -> int:
    if p == k:
        return 1
    if k == 0 or k > p:
        return 0
    return k * stirling2(p - 1, k) + stirling2(p - 1, k - 1)


def binomial_moment(n: int, p: int) -> float:
    """E[K^p] for K ~ Binomial(n, 1/n), via factorial moments E[(K)_k] = (n)_k / n^k."""
    total = Fraction(0)
    for k in range(1, p + 1):
        falling = 1
        for i in range(k):
            falling *= n - i
        total += stirling2(p, k) * Fraction(falling, n**k)
    return float(total)


def within_tolerance(estimate: float, std_error: float, predicted: float) -> bool:
    return abs(estimate - predicted) <= max(3 * std_error, 0.05 * abs(predicted))


def _metadata(config: ExperimentConfig | None, started: float, **extra) -> dict:
    meta = {"environment": environment_metadata(), "wall_time_s": round(time.perf_counter() - started, 3)}
    if config is not None:
        meta["config"] = config.to_dict()
    meta.update(extra)
    return meta


def _real(x) -> float:
    return float(x.real) if isinstance(x, complex) else float(x)


def l4_growth_diagnostic(spec: EnsembleSpec, n_values: Sequence[int], seed: int, samples: int = 2000) -> dict:
    values = {int(n): estimate_l4_constant(spec, int(n), 16, samples, (seed, 7, int(n))) for n in n_values}
    ns = sorted(values)
    return {
        "l4_constant": values,
        "growth_factor": values[ns[-1]] / values[ns[0]] if values[ns[0]] > 0 else math.inf,
    }


def run_convergence(config: ExperimentConfig) -> Report:
    """Monte Carlo E tr S^p against the noncrossing-partition limit on every grid point."""
    started = time.perf_counter()
    spec = config.ensemble
    if spec.kind is Kind.CANONICAL_BASIS:
        lo = config.n_grid[0]
        hi = config.n_grid[-1] if config.n_grid[-1] > lo else 4 * lo
        diag = l4_growth_diagnostic(spec, (lo, hi), config.seed)
        raise HypothesisViolation(
            "CanonicalBasis violates the marginal L4 hypothesis: n^2 sup E|<f,x>|^4 grows with n "
            f"({diag['l4_constant']}, factor {diag['growth_factor']:.2f}); use the counterexample command",
            diag,
        )
    a = predicted_cumulants(spec, config.lam, config.p_max)
    predicted = [_real(m) for m in freemoments.free_moments_up_to(config.p_max, a)]
    rows = []
    for i, n in enumerate(config.n_grid):
        N = config.N_for(n)
        for est in mc_moments(spec, n, N, config.p_max, config.trials, (config.seed, i), config.workers):
            pred = predicted[est.p - 1]
            gap = est.mean - pred
            rows.append(
                {
                    "n": n,
                    "N": N,
                    "p": est.p,
                    "estimate": est.mean,
                    "std_error": est.std_error,
                    "trials": est.trials,
                    "predicted": pred,
                    "abs_gap": abs(gap),
                    "rel_gap": abs(gap) / abs(pred) if pred else math.inf,
                    "within_tolerance": within_tolerance(est.mean, est.std_error, pred),
                }
            )
    n_max = config.n_grid[-1]
    ok = all(r["within_tolerance"] for r in rows if r["n"] == n_max)
    return Report(
        kind="convergence",
        columns=["n", "N", "p", "estimate", "std_error", "trials", "predicted", "abs_gap", "rel_gap", "within_tolerance"],
        rows=rows,
        ok=ok,
        metadata=_metadata(config, started, cumulants=list(a)),
    )


def run_counterexample(config: ExperimentConfig) -> Report:
    """Canonical-basis vectors with N = n: estimates against free, Bell and exact finite-n moments."""
    started = time.perf_counter()
    if config.ensemble.kind is not Kind.CANONICAL_BASIS:
        raise ConfigError("the counterexample run requires the CanonicalBasis ensemble")
    if not math.isclose(config.lam, 1.0, abs_tol=1e-12):
        raise ConfigError("the counterexample run requires lambda = 1")
    a = predicted_cumulants(config.ensemble, 1.0, config.p_max)
    free = [_real(m) for m in freemoments.free_moments_up_to(config.p_max, a)]
    classical = [_real(m) for m in freemoments.classical_moments_up_to(config.p_max, a)]
    rows = []
    for i, n in enumerate(config.n_grid):
        N = config.N_for(n)
        for est in mc_moments(config.ensemble, n, N, config.p_max, config.trials, (config.seed, i), config.workers):
            oracle = binomial_moment(n, est.p)
            rows.append(
                {
                    "n": n,
                    "N": N,
                    "p": est.p,
                    "estimate": est.mean,
                    "std_error": est.std_error,
                    "trials": est.trials,
                    "predicted_free": free[est.p - 1],
                    "predicted_classical": classical[est.p - 1],
                    "binomial_oracle": oracle,
                    "z_vs_oracle": (est.mean - oracle) / est.std_error if est.std_error > 0 else 0.0,
                    "z_vs_free": (est.mean - free[est.p - 1]) / est.std_error if est.std_error > 0 else 0.0,
                    "within_tolerance": abs(est.mean - oracle) <= 3 * est.std_error + 1e-12 * abs(oracle),
                }
            )
    n_max = config.n_grid[-1]
    ok = all(r["within_tolerance"] for r in rows if r["n"] == n_max)
    return Report(
        kind="counterexample",
        columns=[
            "n", "N", "p", "estimate", "std_error", "trials", "predicted_free", "predicted_classical",
            "binomial_oracle", "z_vs_oracle", "z_vs_free", "within_tolerance",
        ],
        rows=rows,
        ok=ok,
        metadata=_metadata(config, started),
    )


def _decay_slope(ns: Sequence[int], est: Sequence[float], se: Sequence[float]) -> tuple[float, float]:
    """Slope of log|estimate| against log n, with its standard error.

    Each log-estimate has variance about (se / est)^2, used as regression
    weights when all standard errors are positive.
    """
    x = np.log(np.asarray(ns, dtype=float))
    y = np.log(np.abs(np.asarray(est, dtype=float)))
    se = np.asarray(se, dtype=float)
    if len(x) < 2:
        return math.nan, math.nan
    if np.all(se > 0):
        w = (np.abs(est) / se) ** 2
        xm = np.sum(w * x) / np.sum(w)
        ym = np.sum(w * y) / np.sum(w)
        sxx = np.sum(w * (x - xm) ** 2)
        slope = np.sum(w * (x - xm) * (y - ym)) / sxx
        return float(slope), float(math.sqrt(1.0 / sxx))
    slope, _ = np.polyfit(x, y, 1)
    return float(slope), math.nan


def run_crossing_decay(config: ExperimentConfig, pi: SetPartition) -> Report:
    """Contribution of all index words with kernel ``pi`` across the n grid."""
    started = time.perf_counter()
    if is_noncrossing(pi):
        raise ConfigError(f"partition {pi} is noncrossing; the decay run needs a crossing partition")
    rows = []
    for i, n in enumerate(config.n_grid):
        N = config.N_for(n)
        if len(pi) > N:
            raise ConfigError(f"partition has {len(pi)} blocks but N = {N}")
        c = partition_contribution(config.ensemble, pi, n, N, config.trials, (config.seed, i))
        rows.append(
            {
                "n": n,
                "N": N,
                "estimate": c.estimate,
                "std_error": c.std_error,
                "imag": c.imag,
                "imag_std_error": c.imag_std_error,
                "significant": abs(c.estimate) >= 3 * c.std_error,
                "trials": c.trials,
            }
        )
    slope, slope_se = _decay_slope(config.n_grid, [r["estimate"] for r in rows], [r["std_error"] for r in rows])
    ok = len(rows) < 2 or slope <= -0.5
    return Report(
        kind="crossing",
        columns=["n", "N", "estimate", "std_error", "imag", "imag_std_error", "significant", "trials"],
        rows=rows,
        ok=ok,
        metadata=_metadata(config, started, partition=pi.to_list(), slope=slope, slope_std_error=slope_se),
        summary={"partition": pi.to_list(), "slope": slope, "slope_std_error": slope_se},
    )


class _Tally:
    def __init__(self) -> None:
        self.instances = 0
        self.violations = 0
        self.min_slack = math.inf

    def add(self, lhs: float, rhs: float, equality: bool = False) -> bool:
        self.instances += 1
        slack = lhs - rhs
        self.min_slack = min(self.min_slack, slack)
        bad = (slack != 0) if equality else (slack < 0)
        self.violations += bad
        return not bad

    def as_dict(self) -> dict:
        return {
            "instances": self.instances,
            "violations": self.violations,
            "min_slack": self.min_slack if self.instances else None,
        }


def _subsets(r: int):
    items = range(1, r + 1)
    return (frozenset(c) for c in chain.from_iterable(combinations(items, k) for k in range(r + 1)))


def _check_system(sys, t_grid, lambdas, tallies, violations) -> None:
    sizes = graphcover.sorted_sizes(sys)
    res = graphcover.sorted_residuals(sys)

    def fail(lemma, detail):
        if len(violations) < 20:
            violations.append({"lemma": lemma, "detail": detail, "system": sys.to_dict()})

    if not tallies["lemma22"].add(sys.ground_size, sum(sizes) / 2, equality=True):
        fail("2.2", {})
    if sum(res) != sys.ground_size:
        fail("residual-sum", {"residuals": res})
    for t in t_grid:
        if not tallies["lemma21"].add(*graphcover._lemma21(sizes, res, t)):
            fail("2.1", {"t": t})
    for lam in lambdas:
        if not tallies["lemma25"].add(*graphcover._lemma25(sizes, res, lam)):
            fail("2.5", {"Lambda": sorted(lam)})
        for k0 in range(1, sys.r + 1):
            if not tallies["lemma23"].add(*graphcover._lemma23(sizes, res, lam, k0)):
                fail("2.3", {"Lambda": sorted(lam), "k0": k0})


def _check_lemma24(m_max: int, tally: _Tally, violations: list) -> None:
    for m in range(1, m_max + 1):
        subsets = list(_subsets(m))
        for lam1 in subsets:
            for lam2 in subsets:
                tally.instances += 1
                pre = graphcover.lemma24_precondition(m, lam1, lam2)
                try:
                    f = graphcover.build_matching_lemma24(m, lam1, lam2)
                except graphcover.PreconditionError:
                    if pre:
                        tally.violations += 1
                        violations.append({"lemma": "2.4", "detail": "refused valid input", "m": m,
                                           "Lambda1": sorted(lam1), "Lambda2": sorted(lam2)})
                    continue
                keys = sorted(f)
                good = (
                    pre
                    and set(keys) == set(lam1)
                    and set(f.values()) <= set(lam2)
                    and all(f[a] < f[b] for a, b in zip(keys, keys[1:]))
                    and all(f[k] >= k for k in keys)
                )
                if not good:
                    tally.violations += 1
                    violations.append({"lemma": "2.4", "m": m, "Lambda1": sorted(lam1), "Lambda2": sorted(lam2)})
                else:
                    tally.min_slack = min(tally.min_slack, min((f[k] - k for k in keys), default=math.inf))


def run_lemma_suite(
    seed: int = 0,
    random_count: int = 10_000,
    exhaustive: bool = True,
    r_max: int = 4,
    m_max: int = 6,
    t_max: float = 7.0,
    random_r_max: int = 8,
    random_m_max: int = 16,
    lemma24_m_max: int = 8,
    random_lambdas: int = 16,
) -> Report:
    """Brute-force check of the two-cover inequalities on exhaustive and random systems."""
    started = time.perf_counter()
    tallies = {name: _Tally() for name in ("lemma21", "lemma22", "lemma23", "lemma24", "lemma25")}
    violations: list[dict] = []
    exhaustive_systems = 0
    if exhaustive:
        t_grid = [k / 2 for k in range(int(2 * t_max) + 1)]
        for sys in graphcover.enumerate_small_multigraphs(r_max, m_max, r_min=2):
            exhaustive_systems += 1
            _check_system(sys, t_grid, list(_subsets(sys.r)), tallies, violations)
        _check_lemma24(lemma24_m_max, tallies["lemma24"], violations)
    rng = derive_rng(seed)
    for i in range(random_count):
        r = int(rng.integers(2, random_r_max + 1))
        m = int(rng.integers(1, random_m_max + 1))
        sys = graphcover.random_two_cover(r, m, (seed, i))
        t_grid = [k / 2 for k in range(2 * (m + 1) + 1)]
        if r <= 4:
            lambdas = list(_subsets(r))
        else:
            lambdas = [frozenset(), frozenset(range(1, r + 1))]
            for _ in range(random_lambdas):
                mask = rng.integers(0, 2, size=r)
                lambdas.append(frozenset(int(k) + 1 for k in np.flatnonzero(mask)))
        _check_system(sys, t_grid, lambdas, tallies, violations)
    total_violations = sum(t.violations for t in tallies.values())
    rows = [{"lemma": name, **t.as_dict()} for name, t in tallies.items()]
    summary = {
        "seed": seed,
        "random_count": random_count,
        "exhaustive": exhaustive,
        "exhaustive_systems": exhaustive_systems,
        "lemmas": {row["lemma"]: {k: v for k, v in row.items() if k != "lemma"} for row in rows},
        "total_violations": total_violations,
        "counterexamples": violations,
    }
    return Report(
        kind="lemmas",
        columns=["lemma", "instances", "violations", "min_slack"],
        rows=rows,
        ok=total_violations == 0,
        metadata=_metadata(None, started, seed=seed, random_count=random_count, exhaustive=exhaustive),
        summary=summary,
    )


def predict(p_max: int, cumulants: Sequence[float]) -> Report:
    """Predicted free (noncrossing) and classical (all partitions) moments."""
    started = time.perf_counter()
    if not 1 <= p_max <= P_MAX_PREDICT:
        raise ConfigError(f"p_max must lie in [1, {P_MAX_PREDICT}] for predictions")
    if len(cumulants) < p_max:
        raise ConfigError(f"need {p_max} cumulants, got {len(cumulants)}")
    free = freemoments.free_moments_up_to(p_max, cumulants)
    classical = freemoments.classical_moments_up_to(p_max, cumulants)
    rows = [
        {"p": p, "predicted_free": _real(f), "predicted_classical": _real(c)}
        for p, f, c in zip(range(1, p_max + 1), free, classical)
    ]
    return Report(
        kind="predict",
        columns=["p", "predicted_free", "predicted_classical"],
        rows=rows,
        metadata=_metadata(None, started, cumulants=list(cumulants[:p_max])),
    )


def run_hypotheses(config: ExperimentConfig, samples: int = 2000, n_directions: int = 64) -> Report:
    """Estimated hypothesis constants for the configured ensemble on each grid point."""
    started = time.perf_counter()
    k_max = config.p_max
    rows = []
    reports = []
    for i, n in enumerate(config.n_grid):
        N = config.N_for(n)
        rep = hypothesis_report(
            config.ensemble, n, N, k_max, seed=config.seed + i, samples=samples, n_directions=n_directions
        )
        reports.append(rep.to_dict())
        row = {"n": n, "N": N, "l4_constant": rep.l4_constant}
        row.update({f"norm_moment_{k}": v for k, v in enumerate(rep.norm_moment_bounds, start=1)})
        row.update({f"cumulant_deviation_{k}": v for k, v in enumerate(rep.cumulant_deviations, start=1)})
        rows.append(row)
    columns = (
        ["n", "N", "l4_constant"]
        + [f"norm_moment_{k}" for k in range(1, k_max + 1)]
        + [f"cumulant_deviation_{k}" for k in range(1, k_max + 1)]
    )
    return Report(
        kind="hypotheses",
        columns=columns,
        rows=rows,
        metadata=_metadata(config, started),
        summary={"reports": reports},
    )
