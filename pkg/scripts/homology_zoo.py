#!/usr/bin/env python3
"""Homology tables for a zoo of small spaces, plus a demonstration of
the transfer calculus: folding the |I|-fold transfer multiplies every
homology group by |I|, exactly.
"""

from coarsehom.groups import GSet, cyclic_group, trivial_group, trivial_gset
from coarsehom.homology import homology, hom_is_multiplication_by, induced_map
from coarsehom.spaces import make_space, maximal_space, minimal_space, point_space
from coarsehom.spans import compose, fold_morphism, transfer_I


def main():
    triv = trivial_group()
    c2 = cyclic_group(2)
    free2 = GSet(c2, 2, ((0, 1), (1, 0)))
    zoo = [
        ("point", point_space(triv)),
        ("4 discrete points", minimal_space(trivial_gset(triv, 4))),
        ("3-point cluster", maximal_space(trivial_gset(triv, 3))),
        (
            "chain 0-1-2",
            make_space(
                trivial_gset(triv, 3),
                [frozenset({(0, 1), (1, 0)}), frozenset({(1, 2), (2, 1)})],
            ),
        ),
        ("free C2 pair, discrete", minimal_space(free2)),
        ("free C2 pair, one cluster", maximal_space(free2)),
    ]
    for label, X in zoo:
        print(f"-- {label}")
        for line in homology(X, 3).describe().splitlines():
            print("   " + line)

    print("-- transfer then fold = multiplication by |I|")
    X = minimal_space(trivial_gset(triv, 3))
    for k in (2, 3, 5):
        I = trivial_gset(triv, k)
        comp = compose(transfer_I(X, I), fold_morphism(X, I))
        homs = induced_map(comp, 2)
        verdict = all(hom_is_multiplication_by(h, k) for h in homs)
        print(f"   |I| = {k}: every degree multiplied by {k}: {verdict}")


if __name__ == "__main__":
    main()
