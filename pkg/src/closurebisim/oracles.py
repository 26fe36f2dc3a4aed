"""Brute-force reference implementations for small models.

These follow the defining conditions directly (subset enumeration, pair
fixpoints, walk enumeration) and share no code with the fast deciders, so the
test suite can check one against the other.  All of them are exponential or
polynomial of high degree; each carries a size guard.
"""
import numpy as np

from .errors import TooLargeError
from .logic import (And, Atom, Bottom, NearBwd, NearFwd, Not, Or, Propagate, RhoBwd, RhoFwd,
                    SigmaBwd, SigmaFwd, Surround, Top, ZetaBwd, ZetaFwd)
from .model import Partition


def _guard(model, limit, what):
    if model.n > limit:
        raise TooLargeError(f"{what} is limited to {limit} points, model has {model.n}")


def _masks(model):
    succ = [0] * model.n
    pred = [0] * model.n
    for a, b in model.edges():
        succ[a] |= 1 << b
        pred[b] |= 1 << a
    return succ, pred


def _bits(mask):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def _supersets(base, full):
    free = full & ~base
    sub = free
    while True:
        yield base | sub
        if sub == 0:
            return
        sub = (sub - 1) & free


def _in_interior(x, s, around):
    """``x`` is in the interior of ``s`` when ``s`` holds ``x`` and all of ``around[x]``."""
    return (s >> x) & 1 and around[x] & ~s == 0


def _ap_matrix(model):
    labs = model.label_ids
    return labs[:, None] == labs[None, :]


def _gfp(b, keep, symmetric=False):
    """Remove pairs failing ``keep(b, x, y)`` until nothing changes."""
    b = b.copy()
    changed = True
    while changed:
        changed = False
        for x, y in zip(*np.nonzero(b)):
            if b[x, y] and not keep(b, int(x), int(y)):
                b[x, y] = False
                if symmetric:
                    b[y, x] = False
                changed = True
    return b


def _rows(b):
    n = b.shape[0]
    row = [0] * n
    col = [0] * n
    for x, y in zip(*np.nonzero(b)):
        row[x] |= 1 << int(y)
        col[y] |= 1 << int(x)
    return row, col


def _image(mask, rel):
    out = 0
    for v in _bits(mask):
        out |= rel[v]
    return out


def relation_to_partition(b):
    """Convert an equivalence relation given as a boolean matrix."""
    if not (np.array_equal(b, b.T) and b.diagonal().all() and np.array_equal((b.astype(int) @ b.astype(int)) > 0, b)):
        raise ValueError("relation is not an equivalence")
    return Partition([int(np.flatnonzero(row)[0]) for row in b])


# ------------------------------------------------------------ bisimilarities

def _neighbourhood_gfp(model, arounds):
    """Largest relation satisfying the neighbourhood transfer conditions for
    each interior in ``arounds`` (neighbourhoods enumerated, not reduced)."""
    full = (1 << model.n) - 1

    def keep(b, x1, x2):
        row, col = _rows(b)
        for around in arounds:
            base1 = (1 << x1) | around[x1]
            for s1 in _supersets(base1, full):
                if not _in_interior(x2, _image(s1, row), around):
                    return False
            base2 = (1 << x2) | around[x2]
            for s2 in _supersets(base2, full):
                if not _in_interior(x1, _image(s2, col), around):
                    return False
        return True

    return _gfp(_ap_matrix(model), keep)


def cm_neighbourhood_oracle(model, max_points=10):
    """CM-bisimilarity with every neighbourhood enumerated."""
    _guard(model, max_points, "neighbourhood enumeration")
    _, pred = _masks(model)
    return _neighbourhood_gfp(model, [pred])


def cmc_neighbourhood_oracle(model, max_points=10):
    """CMC-bisimilarity: neighbourhoods for both the forward and backward interior."""
    _guard(model, max_points, "neighbourhood enumeration")
    succ, pred = _masks(model)
    return _neighbourhood_gfp(model, [pred, succ])


def _mutual(b, left, right):
    return all(any(b[s, t] for t in right) for s in left) and \
        all(any(b[s, t] for s in left) for t in right)


def cm_minimal_oracle(model, max_points=200):
    """CM-bisimilarity matching only the minimal neighbourhoods ``{x} + pred(x)``."""
    _guard(model, max_points, "pair fixpoint")
    pred = [set(model.predecessors(x).tolist()) | {x} for x in range(model.n)]
    return _gfp(_ap_matrix(model), lambda b, x, y: _mutual(b, pred[x], pred[y]))


def c_bisim_oracle(model, max_points=200):
    """C-bisimilarity, transfer conditions on singleton closures in both directions."""
    _guard(model, max_points, "pair fixpoint")
    fw = [set(model.successors(x).tolist()) | {x} for x in range(model.n)]
    bw = [set(model.predecessors(x).tolist()) | {x} for x in range(model.n)]
    return _gfp(_ap_matrix(model),
                lambda b, x, y: _mutual(b, fw[x], fw[y]) and _mutual(b, bw[x], bw[y]))


def reach_by_walks(model, x, backward=False):
    """Endpoints of walks from ``x`` found by plain depth-first search."""
    nbrs = model.predecessors if backward else model.successors
    seen, stack = {x}, [x]
    while stack:
        v = stack.pop()
        for w in nbrs(v).tolist():
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return seen


def path_oracle(model, max_points=200):
    """Path-bisimilarity: bounded forward paths end exactly in the forward
    reach set, bounded backward paths start exactly in the backward one."""
    _guard(model, max_points, "pair fixpoint")
    fw = [reach_by_walks(model, x) for x in range(model.n)]
    bw = [reach_by_walks(model, x, backward=True) for x in range(model.n)]
    return _gfp(_ap_matrix(model),
                lambda b, x, y: _mutual(b, fw[x], fw[y]) and _mutual(b, bw[x], bw[y]))


def dbsc_oracle(model, max_points=60):
    """Divergence-blind stuttering equivalence with converse on ``R`` plus self-loops."""
    _guard(model, max_points, "pair fixpoint")
    n = model.n
    succ = [set(model.successors(x).tolist()) | {x} for x in range(n)]
    pred = [set(model.predecessors(x).tolist()) | {x} for x in range(n)]

    def zone(b, s, t, nbrs):
        # points reachable from t through points related to s
        seen, stack = {t}, [t]
        while stack:
            v = stack.pop()
            for w in nbrs[v]:
                if w not in seen and b[s, w]:
                    seen.add(w)
                    stack.append(w)
        out = set(seen)
        for v in seen:
            out |= nbrs[v]
        return out

    def keep(b, s, t):
        ends = zone(b, s, t, succ)
        if not all(any(b[s2, e] for e in ends) for s2 in succ[s]):
            return False
        starts = zone(b, s, t, pred)
        return all(any(b[s2, e] for e in starts) for s2 in pred[s])

    return _gfp(_ap_matrix(model), keep, symmetric=True)


def inl_oracle(model, max_points=15):
    """INL-bisimilarity by neighbourhood enumeration.

    For a neighbourhood ``S1`` the best answer is ``S2 = Match(S1)``, the
    largest set all of whose points have a partner in ``S1``; it is a
    neighbourhood of ``x2`` exactly when ``x2`` is in its interior, and then
    the forth condition asks that every point of ``S1`` has some partner.
    """
    _guard(model, max_points, "INL enumeration")
    full = (1 << model.n) - 1
    _, pred = _masks(model)

    def keep(b, x1, x2):
        row, col = _rows(b)
        partnered1 = sum(1 << v for v in range(model.n) if row[v])
        partnered2 = sum(1 << v for v in range(model.n) if col[v])
        for s1 in _supersets((1 << x1) | pred[x1], full):
            if s1 & ~partnered1 or not _in_interior(x2, _image(s1, row), pred):
                return False
        for s2 in _supersets((1 << x2) | pred[x2], full):
            if s2 & ~partnered2 or not _in_interior(x1, _image(s2, col), pred):
                return False
        return True

    return _gfp(_ap_matrix(model), keep)


# ------------------------------------------------------------- logic by walks

def _walk_exists(model, start, target, via, via_at_start, backward=False):
    """Search all walks over ``R`` plus self-loops of length at most ``n``."""
    nbrs = model.predecessors if backward else model.successors
    limit = model.n

    def dfs(v, length):
        if target[v]:
            return True
        if length == limit or ((length > 0 or via_at_start) and not via[v]):
            return False
        return any(dfs(w, length + 1) for w in [v] + nbrs(v).tolist())

    return dfs(start, 0)


def _bad_simple_walk(model, x, inner, border):
    """A simple walk from ``x`` that reaches ``~inner`` without touching ``border`` after the start."""
    def dfs(v, seen):
        for w in model.successors(v).tolist():
            if w in seen or border[w]:
                continue
            if not inner[w]:
                return True
            if dfs(w, seen | {w}):
                return True
        return False

    return dfs(x, {x})


def oracle_evaluate(model, f, max_points=8):
    """Satisfaction set computed from the path semantics by walk enumeration."""
    _guard(model, max_points, "walk enumeration")
    n = model.n
    memo = {}

    def ev(g):
        key = id(g)
        if key in memo:
            return memo[key]
        if isinstance(g, Top):
            out = np.ones(n, dtype=bool)
        elif isinstance(g, Bottom):
            out = np.zeros(n, dtype=bool)
        elif isinstance(g, Atom):
            out = model.prop_set(g.name)
        elif isinstance(g, Not):
            out = ~ev(g.arg)
        elif isinstance(g, And):
            out = np.logical_and.reduce([ev(h) for h in g.args])
        elif isinstance(g, Or):
            out = np.logical_or.reduce([ev(h) for h in g.args])
        elif isinstance(g, (NearFwd, NearBwd)):
            a = ev(g.arg)
            out = a.copy()
            for s, t in model.edges():
                if isinstance(g, NearFwd) and a[s]:
                    out[t] = True
                if isinstance(g, NearBwd) and a[t]:
                    out[s] = True
        elif isinstance(g, (SigmaFwd, SigmaBwd)):
            a, every = ev(g.arg), np.ones(n, dtype=bool)
            back = isinstance(g, SigmaBwd)
            out = np.array([_walk_exists(model, x, a, every, False, back) for x in range(n)])
        elif isinstance(g, (RhoFwd, RhoBwd, ZetaFwd, ZetaBwd)):
            t, v = ev(g.target), ev(g.via)
            back = isinstance(g, (RhoBwd, ZetaBwd))
            at_start = isinstance(g, (ZetaFwd, ZetaBwd))
            out = np.array([_walk_exists(model, x, t, v, at_start, back) for x in range(n)])
        elif isinstance(g, Surround):
            inner, border = ev(g.inner), ev(g.border)
            out = np.array([inner[x] and not _bad_simple_walk(model, x, inner, border)
                            for x in range(n)])
        elif isinstance(g, Propagate):
            src, via = ev(g.source), ev(g.via)
            out = np.array([via[x] and _walk_exists(model, x, src, via, False, True)
                            for x in range(n)])
        else:
            raise TypeError(f"not a formula: {g!r}")
        memo[key] = out
        return out

    return ev(f)
