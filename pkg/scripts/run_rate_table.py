#!/usr/bin/env python3
"""Empirical rate table: fitted log-log slope of regret vs eps per cell.

For every (problem, distance, policy) cell, evaluates the named adversarial
witness across an eps grid and fits the exponent; columns show the slope
the analytic sandwich predicts.  Cells with eps-independent regret (pricing
and ski rental SAA under Wasserstein) report a slope near zero.
"""

import argparse

from heterodro.cli import ExperimentConfig, fit_rate, run_experiment
from heterodro.metrics import DistanceKind
from heterodro.policies import PolicySpec
from heterodro.problems import ProblemSpec

K, TV, W = DistanceKind.KOLMOGOROV, DistanceKind.TOTAL_VARIATION, DistanceKind.WASSERSTEIN

EPS_GRID = (0.01, 0.02, 0.04, 0.08)

# (problem, kind, policy or None for recommended, predicted exponent)
CELLS = [
    (ProblemSpec.newsvendor(1, 1, 1), K, PolicySpec.saa(), 1.0),
    (ProblemSpec.newsvendor(1, 1, 1), TV, PolicySpec.saa(), 1.0),
    (ProblemSpec.newsvendor(1, 1, 1), W, PolicySpec.saa(), 1.0),
    (ProblemSpec.pricing(1), K, PolicySpec.saa(), 1.0),
    (ProblemSpec.pricing(1), TV, PolicySpec.saa(), 1.0),
    (ProblemSpec.pricing(1), W, PolicySpec.saa(), 0.0),
    (ProblemSpec.pricing(1), W, None, 0.5),
    (ProblemSpec.ski_rental(3, 10), K, PolicySpec.saa(), 1.0),
    (ProblemSpec.ski_rental(1, 10), K, None, 1.0),
    (ProblemSpec.ski_rental(2, 10), W, PolicySpec.saa(), 0.0),
    (ProblemSpec.ski_rental(1, 10), W, None, 0.5),
]


def run(seed: int) -> None:
    header = f"{'problem':<12} {'distance':<16} {'policy':<12} {'slope':>8} {'predicted':>10}"
    print(header)
    print("-" * len(header))
    for problem, kind, policy, predicted in CELLS:
        cfg = ExperimentConfig(
            problem=problem,
            kind=kind,
            policy=policy,
            eps_grid=EPS_GRID,
            seed=seed,
            mode="adversarial-named",
        )
        points = [(eps, rep.estimate) for eps, rep, _ in run_experiment(cfg) if rep]
        label = "recommended" if policy is None else policy.to_text()
        try:
            slope = f"{fit_rate(points).slope:8.3f}"
        except ValueError:
            slope = "   flat " if len({r for _, r in points}) <= 1 else "     n/a"
        print(
            f"{problem.kind.value:<12} {kind.value:<16} {label:<12} {slope:>8} {predicted:>10.1f}"
        )


if __name__ == "__main__":
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--seed", type=int, default=42)
    run(parser.parse_args().seed)
