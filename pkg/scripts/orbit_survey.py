#!/usr/bin/env python3
"""Randomized survey of classifier behavior across basis-change orbits.

For every catalog class at the chosen arity, apply a batch of seeded
random basis changes and classify each moved table. One row per class
reports how many verdicts came back exact with the right label, the
largest numerator or denominator appearing in any witness, and wall
time. Handy for spotting coefficient blowups or slow normalization
paths before they surface as test timeouts.

    python3 scripts/orbit_survey.py --arity 3 --samples 10 --bound 3
"""

from __future__ import annotations

import argparse
import sys
import time
from dataclasses import dataclass
from typing import Optional, Sequence

from nlie.catalog import canonical, d7_equivalent, np2_labels
from nlie.classify import EXACT, classify_np2
from nlie.transform import change_basis_multilinear, random_basis_change


@dataclass
class SurveyConfig:
    arity: int = 3
    samples: int = 10
    bound: int = 3
    base_seed: int = 7
    verbose: bool = False


def witness_height(matrix) -> int:
    """Largest |numerator| or denominator over all entries."""
    worst = 0
    for row in matrix.entries:
        for x in row:
            worst = max(worst, abs(x.numerator), x.denominator)
    return worst


def label_matches(original, recovered) -> bool:
    if original.family == "d7":
        return (recovered.family == "d7"
                and d7_equivalent(original.stu, recovered.stu).equivalent
                is True)
    return recovered == original


def survey(cfg: SurveyConfig) -> int:
    labels = np2_labels(cfg.arity)
    dim = cfg.arity + 2
    width = max(len(str(lab)) for lab in labels)
    print(f"arity {cfg.arity}, {cfg.samples} samples per class, "
          f"entry bound {cfg.bound}, base seed {cfg.base_seed}")
    bad_total = 0
    for lab in labels:
        a = canonical(cfg.arity, lab)
        exact = 0
        height = 0
        bad: list = []
        t0 = time.monotonic()
        for i in range(cfg.samples):
            seed = cfg.base_seed + 1009 * i
            t = random_basis_change(dim, seed=seed, bound=cfg.bound)
            verdict = classify_np2(change_basis_multilinear(a, t))
            if verdict.status == EXACT and label_matches(lab, verdict.label):
                exact += 1
                height = max(height, witness_height(verdict.witness))
            else:
                bad.append((seed, verdict.status, verdict.label))
        dt = time.monotonic() - t0
        bad_total += len(bad)
        print(f"  {str(lab):<{width}}  exact {exact}/{cfg.samples}  "
              f"max witness height {height:>8}  {dt:6.2f}s")
        if cfg.verbose:
            for seed, status, got in bad:
                print(f"    seed {seed}: {status} {got}")
    if bad_total:
        print(f"{bad_total} sample(s) did not round-trip")
        return 1
    print("all samples round-tripped exactly")
    return 0


def parse_args(argv: Optional[Sequence[str]]) -> SurveyConfig:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--arity", type=int, default=3)
    parser.add_argument("--samples", type=int, default=10)
    parser.add_argument("--bound", type=int, default=3)
    parser.add_argument("--base-seed", type=int, default=7)
    parser.add_argument("--verbose", action="store_true",
                        help="list every sample that failed to round-trip")
    args = parser.parse_args(argv)
    return SurveyConfig(arity=args.arity, samples=args.samples,
                        bound=args.bound, base_seed=args.base_seed,
                        verbose=args.verbose)


if __name__ == "__main__":
    sys.exit(survey(parse_args(None)))
