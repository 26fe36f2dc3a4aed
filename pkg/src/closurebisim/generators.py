"""Seeded random models and formulas for property tests and the CLI."""
import numpy as np

from .logic import (FALSE, TRUE, And, Atom, NearBwd, NearFwd, Not, Or, Propagate, RhoBwd, RhoFwd,
                    SigmaBwd, SigmaFwd, Surround, ZetaBwd, ZetaFwd)
from .model import QdModel

# unary / binary modal operators allowed in each fragment
FRAGMENTS = {
    "prop": ((), ()),
    "iml": ((NearFwd,), ()),
    "imlc": ((NearFwd, NearBwd), ()),
    "islcs": ((), (RhoFwd, RhoBwd)),
    "irl": ((SigmaFwd, SigmaBwd), ()),
    "icrl": ((), (ZetaFwd, ZetaBwd)),
    "full": ((NearFwd, NearBwd, SigmaFwd, SigmaBwd),
             (RhoFwd, RhoBwd, ZetaFwd, ZetaBwd, Surround, Propagate)),
}


def random_model(rng, n=None, max_points=12, density=None, props=("r", "g", "b"),
                 label_p=0.4, self_loops=0.1):
    """Random directed model; ``rng`` is a ``numpy.random.Generator`` or a seed."""
    rng = np.random.default_rng(rng)
    if n is None:
        n = int(rng.integers(1, max_points + 1))
    if density is None:
        density = float(rng.uniform(0.05, min(0.6, 3.0 / max(n, 1) + 0.1)))
    adj = rng.random((n, n)) < density
    np.fill_diagonal(adj, rng.random(n) < self_loops)
    src, dst = np.nonzero(adj)
    k = int(rng.integers(1, len(props) + 1))
    val = {p: np.flatnonzero(rng.random(n) < label_p).tolist() for p in props[:k]}
    return QdModel([f"p{i}" for i in range(n)], list(zip(src.tolist(), dst.tolist())), val)


def random_formula(rng, props, depth=3, fragment="full"):
    """Random formula over ``props`` with nesting at most ``depth``."""
    rng = np.random.default_rng(rng)
    unary, binary = FRAGMENTS[fragment]
    props = list(props) or ["p"]

    def leaf():
        r = rng.random()
        if r < 0.1:
            return TRUE if rng.random() < 0.5 else FALSE
        return Atom(props[int(rng.integers(len(props)))])

    def gen(d):
        if d == 0:
            return leaf()
        kinds = ["leaf", "not", "and", "or"] + ["un"] * (2 if unary else 0) + ["bin"] * (2 if binary else 0)
        k = kinds[int(rng.integers(len(kinds)))]
        if k == "leaf":
            return leaf()
        if k == "not":
            return Not(gen(d - 1))
        if k in ("and", "or"):
            args = tuple(gen(d - 1) for _ in range(int(rng.integers(2, 4))))
            return And(args) if k == "and" else Or(args)
        if k == "un":
            return unary[int(rng.integers(len(unary)))](gen(d - 1))
        return binary[int(rng.integers(len(binary)))](gen(d - 1), gen(d - 1))

    return gen(depth)
