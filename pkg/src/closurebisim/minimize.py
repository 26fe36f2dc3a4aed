"""Quotients modulo an equivalence, and an empirical soundness check for them."""
import warnings
from dataclasses import dataclass

import numpy as np

from .equivalences import EquivalenceKind, equivalence
from .generators import random_formula
from .logic import evaluate, to_text
from .model import disjoint_union, quotient

# logic fragment that characterises each equivalence
KIND_LOGIC = {
    EquivalenceKind.AP: "prop",
    EquivalenceKind.CM: "iml",
    EquivalenceKind.CMC: "imlc",
    EquivalenceKind.PATH: "irl",
    EquivalenceKind.COPA: "icrl",
}


@dataclass(frozen=True)
class MinimizationResult:
    quotient: object
    projection: np.ndarray
    kind: EquivalenceKind
    class_count: int

    def mapping(self, model):
        return {model.names[i]: self.quotient.names[int(q)] for i, q in enumerate(self.projection)}


def minimize(model, kind):
    kind = EquivalenceKind(kind)
    if kind is EquivalenceKind.CM:
        warnings.warn("soundness of CM quotients is not established in general; "
                      "check the result with verify_quotient", UserWarning, stacklevel=2)
    part = equivalence(model, kind)
    q, proj = quotient(model, part)
    return MinimizationResult(q, proj, kind, q.n)


@dataclass(frozen=True)
class QuotientCheck:
    ok: bool
    counterexample: str = ""

    def __bool__(self):
        return self.ok


def verify_quotient(model, result, n_formulas=200, seed=0, depth=4):
    """Recompute the equivalence on ``model + quotient`` and sample formulas.

    Every point must be equivalent to its image in the union, and agree with
    it on ``n_formulas`` random formulas of the kind's logic.
    """
    kind = EquivalenceKind(result.kind)
    proj = np.asarray(result.projection)
    if proj.shape != (model.n,) or proj.min(initial=0) < 0 or proj.max(initial=0) >= result.quotient.n:
        return QuotientCheck(False, "projection is not a map onto the quotient points")
    if np.unique(proj).size != result.quotient.n:
        return QuotientCheck(False, "projection is not onto the quotient")
    union, inj1, inj2 = disjoint_union(model, result.quotient)
    image = inj2[proj]
    cls = equivalence(union, kind).class_of
    bad = np.flatnonzero(cls[inj1] != cls[image])
    if bad.size:
        x = int(bad[0])
        return QuotientCheck(False, f"{model.names[x]} is not {kind.value}-equivalent to its image "
                                    f"{result.quotient.names[proj[x]]}")
    rng = np.random.default_rng(seed)
    props = union.props
    for _ in range(n_formulas):
        f = random_formula(rng, props, depth=depth, fragment=KIND_LOGIC[kind])
        sat = evaluate(union, f)
        diff = np.flatnonzero(sat[inj1] != sat[image])
        if diff.size:
            x = int(diff[0])
            return QuotientCheck(False, f"{to_text(f)} separates {model.names[x]} from its image "
                                        f"{result.quotient.names[proj[x]]}")
    return QuotientCheck(True)
