"""Exhaustive search for a model with two points that are Path-bisimilar but
not CoPa-bisimilar; writes the smallest one found as the ``fig8`` fixture.

Models are enumerated by increasing point count, then number of
propositions, then edge set (no self-loops: they change neither
equivalence).  When the pair found shares a component, the model is laid
next to a disjoint copy of itself and the pair becomes (x, copy of y), so
the two points sit in separate components.  Points are renamed
``t<component><k>`` with the pair points first in their components.

    python3 scripts/search_fig8.py [--out src/closurebisim/fixtures/fig8.json]
"""
import argparse
import itertools
import sys

import numpy as np
from scipy.sparse.csgraph import connected_components

from closurebisim.equivalences import copa_bisimilarity, path_bisimilarity
from closurebisim.io import save_model
from closurebisim.model import QdModel, disjoint_union


def candidates(max_points):
    for n in range(2, max_points + 1):
        slots = [(a, b) for a in range(n) for b in range(n) if a != b]
        for k in (1, 2):
            for labels in itertools.product(range(2 ** k), repeat=n):
                if labels[0] != 0 or list(labels) != sorted(labels):
                    continue  # labels sorted: point order is arbitrary anyway
                val = {f"p{j}": [i for i in range(n) if labels[i] >> j & 1] for j in range(k)}
                for mask in range(1 << len(slots)):
                    edges = [slots[i] for i in range(len(slots)) if mask >> i & 1]
                    yield QdModel([str(i) for i in range(n)], edges, val)


def find(max_points):
    for m in candidates(max_points):
        path, copa = path_bisimilarity(m), copa_bisimilarity(m)
        if len(path) == len(copa):
            continue
        for x, y in itertools.combinations(range(m.n), 2):
            if path.same(x, y) and not copa.same(x, y):
                return m, x, y
    return None


def split(m, x, y):
    _, comp = connected_components(m.adjacency(), directed=True, connection="weak")
    if comp[x] != comp[y]:
        return m, x, y
    u, _, right = disjoint_union(m, m)
    return u, x, int(right[y])


def rename(m, x, y):
    m, x, y = split(m, x, y)
    _, comp = connected_components(m.adjacency(), directed=True, connection="weak")
    order = list(dict.fromkeys([comp[x], comp[y]] + comp.tolist()))
    names = [None] * m.n
    for c, label in enumerate(order, start=1):
        members = sorted(np.flatnonzero(comp == label).tolist(), key=lambda i: (i not in (x, y), i))
        for k, i in enumerate(members, start=1):
            names[i] = f"t{c}{k}"
    props = {"p0": "r", "p1": "b"}
    pos = np.argsort(np.argsort(names))  # write points in name order
    val = {props[p]: pos[np.flatnonzero(mask)].tolist() for p, mask in m.valuation.items()}
    edges = [(int(pos[a]), int(pos[b])) for a, b in m.edges()]
    return QdModel(sorted(names), edges, val), names[x], names[y]


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="src/closurebisim/fixtures/fig8.json")
    ap.add_argument("--max-points", type=int, default=6)
    args = ap.parse_args(argv)
    hit = find(args.max_points)
    if hit is None:
        print("no Path-but-not-CoPa pair found", file=sys.stderr)
        return 1
    model, a, b = rename(*hit)
    with open(args.out, "w") as fh:
        fh.write(save_model(model))
    print(f"{args.out}: {model.n} points, {model.n_edges} edges, pair ({a}, {b})")
    return 0


if __name__ == "__main__":
    sys.exit(main())
