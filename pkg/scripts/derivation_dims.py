#!/usr/bin/env python3
"""Tabulate structural dimensions across the whole catalog.

Prints one row per canonical class and one column group per requested
arity: dimension of the derived algebra, of the center, and of the
derivation algebra. The d-branch is where the interesting pattern sits;
d2 lands on n^2+1 and d3 on n^2+3 at every arity this script has been
run at.

    python3 scripts/derivation_dims.py --arities 3 4
"""

from __future__ import annotations

import argparse
import sys
import time
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

from nlie.algebra import invariant_signature
from nlie.catalog import canonical, np1_labels, np2_labels


@dataclass
class TableConfig:
    arities: List[int] = field(default_factory=lambda: [3, 4])
    include_lower: bool = True   # dimension n+1 classes too


def family_key(label) -> str:
    """Group key so parametric labels share a row with their family."""
    return label.family


def rows_for(n: int, cfg: TableConfig):
    labels = list(np2_labels(n))
    if cfg.include_lower:
        labels = list(np1_labels(n)) + labels
    return labels


def tabulate(cfg: TableConfig) -> int:
    header = f"{'class':<14}"
    for n in cfg.arities:
        header += f"  | n={n}: A1   Z  Der"
    print(header)
    print("-" * len(header))
    start = time.monotonic()
    # row labels come from the smallest arity; larger arities share them
    base = rows_for(min(cfg.arities), cfg)
    for lab in base:
        line = f"{str(lab):<14}"
        for n in cfg.arities:
            match = [l for l in rows_for(n, cfg) if str(l) == str(lab)]
            if not match:
                line += f"  | {'absent':>13}"
                continue
            sig = invariant_signature(canonical(n, match[0]))
            line += (f"  |    {sig.dim_derived:>2}  {sig.dim_center:>2} "
                     f" {sig.dim_der_algebra:>3}")
        print(line)
    print(f"({time.monotonic() - start:.1f}s)")
    return 0


def parse_args(argv: Optional[Sequence[str]]) -> TableConfig:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--arities", type=int, nargs="+", default=[3, 4])
    parser.add_argument("--skip-lower", action="store_true",
                        help="leave out the dimension-(n+1) classes")
    args = parser.parse_args(argv)
    return TableConfig(arities=args.arities,
                       include_lower=not args.skip_lower)


if __name__ == "__main__":
    sys.exit(tabulate(parse_args(None)))
