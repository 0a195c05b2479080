#!/usr/bin/env python3
"""Survey the degree-0 assembly map over several groups and families,
cross-checking each verdict against the independent colimit oracle.

The headline run is A5 over its solvable subgroups; the trivial-family
rows show genuinely non-split assembly maps for comparison.
"""

import sys
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "tests"))

from oracles import oracle_assembly_verdicts

from coarsehom.groups import (
    alternating_group,
    cyclic_group,
    family_all,
    family_solvable,
    family_trivial,
    is_separating,
    symmetric_group,
)
from coarsehom.mackey import assembly


def main():
    catalog = [
        ("C2", cyclic_group(2)),
        ("C3", cyclic_group(3)),
        ("C4", cyclic_group(4)),
        ("S3", symmetric_group(3)),
        ("A4", alternating_group(4)),
        ("A5", alternating_group(5)),
    ]
    print(f"{'group':<5} {'family':<5} {'sep':<5} {'colimit':<14} {'verdict':<24} oracle")
    for name, g in catalog:
        for fam in (family_all(g), family_solvable(g), family_trivial(g)):
            t0 = time.time()
            r = assembly(g, fam, 0)
            oi, osp = oracle_assembly_verdicts(g, fam)
            agree = "agree" if (r.injective, r.split) == (oi, osp) else "DISAGREE"
            sep = "yes" if is_separating(g, fam) else "no"
            verdict = f"inj={r.injective} split={r.split}"
            print(
                f"{name:<5} {fam.name:<5} {sep:<5} {r.colimit.describe():<14} "
                f"{verdict:<24} {agree} ({time.time() - t0:.2f}s, {r.label})"
            )


if __name__ == "__main__":
    main()
