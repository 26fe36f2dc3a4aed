"""Deciders for the spatial equivalences.

Every bisimilarity here is computed as the coarsest stable partition refining
AP-equivalence, by signature refinement:

* CM    -- classes of ``{x} + pred(x)``
* CMC/C -- classes of ``{x} + succ(x)`` and of ``{x} + pred(x)``
* Path  -- classes reachable from ``x`` and classes reaching ``x``
* CoPa  -- classes reachable by an inert walk plus one step, both directions
  (divergence-blind stuttering equivalence with converse on ``R`` plus
  self-loops)

The brute-force pair fixpoints in :mod:`closurebisim.oracles` check each of
these.
"""
import enum
from collections import deque
from dataclasses import dataclass

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from . import _kernels
from .errors import ModelError, NoWitnessError, TooLargeError
from .logic import And, Atom, NearBwd, NearFwd, Not, evaluate
from .model import Partition, ap_partition, closure, strong_components


class EquivalenceKind(str, enum.Enum):
    AP = "ap"
    CM = "cm"
    CMC = "cmc"
    PATH = "path"
    COPA = "copa"


# ------------------------------------------------------------------ driver

def _refine(cls, key_of, keep_history=False):
    """Split classes by ``key_of(cls)`` (which must encode ``cls`` itself)
    until the class count is stable."""
    history = [cls] if keep_history else None
    count = int(cls.max()) + 1
    while True:
        _, new = np.unique(key_of(cls), return_inverse=True)
        new = new.reshape(-1).astype(np.int64)
        if int(new.max()) + 1 == count:
            return cls, history
        cls, count = new, int(new.max()) + 1
        if keep_history:
            history.append(cls)


def _exact_key(cls, cols):
    """Collision-free key for ``(cls, *cols)`` where every column is below ``n``."""
    n = np.int64(max(cls.size, 1))
    if len(cols) < 3 and cls.size < 2 ** 20:
        key = cls.astype(np.int64)
        for c in cols:
            key = key * n + c
        return key
    _, inv = np.unique(np.column_stack([cls] + list(cols)), axis=0, return_inverse=True)
    return inv.reshape(-1)


def ap_equivalence(model):
    return ap_partition(model)


def _exact_signature(model, forward, backward):
    def key_of(cls):
        cols = []
        for on, ptr, idx in ((forward, model.succ_ptr, model.succ_idx),
                             (backward, model.pred_ptr, model.pred_idx)):
            if not on:
                continue
            ids, col = {}, np.empty(model.n, dtype=np.int64)
            for v in range(model.n):
                key = frozenset(cls[idx[ptr[v]:ptr[v + 1]]].tolist()) | {int(cls[v])}
                col[v] = ids.setdefault(key, len(ids))
            cols.append(col)
        return _exact_key(cls, cols)
    return key_of


def _neighbour_refinement(model, forward, backward, history=False):
    def hashed(cls):
        return _kernels.neighbour_key(model.succ_ptr, model.succ_idx, model.pred_ptr,
                                      model.pred_idx, cls, forward, backward)

    cls, hist = _refine(np.array(ap_partition(model).class_of), hashed, history)
    stable = True
    if forward:
        stable &= _kernels.class_sets_uniform(model.succ_ptr, model.succ_idx, cls, True, cls)
    if backward:
        stable &= _kernels.class_sets_uniform(model.pred_ptr, model.pred_idx, cls, True, cls)
    if not stable:  # pragma: no cover - needs a 64-bit hash collision
        cls, more = _refine(cls, _exact_signature(model, forward, backward), history)
        if history:
            hist = hist + more[1:]
    part = Partition(cls)
    return (part, hist) if history else part


def cm_bisimilarity(model):
    """CM-bisimilarity.

    Any neighbourhood of ``x`` contains its minimal one, ``{x} + pred(x)``;
    the smallest ``S1`` is the hardest to answer and the smallest ``S2`` the
    easiest to offer, so the transfer conditions reduce to matching the
    minimal neighbourhoods.
    """
    return _neighbour_refinement(model, forward=False, backward=True)


def c_bisimilarity(model, history=False):
    """C-bisimilarity (equivalently CMC-bisimilarity) on ``R`` plus self-loops, both directions.

    With ``history=True`` also returns the class arrays of every refinement
    round, starting from AP-equivalence.
    """
    return _neighbour_refinement(model, forward=True, backward=True, history=history)


cmc_bisimilarity = c_bisimilarity


# ------------------------------------------------------ DAG set propagation

def _topological(n_comp, dag_src, dag_dst):
    """Components in an order where every DAG edge goes from later to earlier."""
    indeg = np.bincount(dag_src, minlength=n_comp)  # out-degree in the DAG
    preds = [[] for _ in range(n_comp)]
    for a, b in zip(dag_src.tolist(), dag_dst.tolist()):
        preds[b].append(a)
    order = [c for c in range(n_comp) if indeg[c] == 0]
    remaining = indeg.copy()
    head = 0
    while head < len(order):
        c = order[head]
        head += 1
        for p in preds[c]:
            remaining[p] -= 1
            if remaining[p] == 0:
                order.append(p)
    return order


def _propagate_sets(n_comp, base_comp, base_val, dag_src, dag_dst):
    """Per component: its base values plus everything from DAG descendants."""
    sets = [set() for _ in range(n_comp)]
    for c, v in zip(base_comp.tolist(), base_val.tolist()):
        sets[c].add(v)
    if dag_src.size:
        succ = [[] for _ in range(n_comp)]
        for a, b in zip(dag_src.tolist(), dag_dst.tolist()):
            succ[a].append(b)
        for c in _topological(n_comp, dag_src, dag_dst):
            for b in succ[c]:
                sets[c] |= sets[b]
    return sets


def _set_ids(sets):
    ids, out = {}, np.empty(len(sets), dtype=np.int64)
    for c, s in enumerate(sets):
        out[c] = ids.setdefault(frozenset(s), len(ids))
    return out


def _unique_pairs(a, b):
    if a.size == 0:
        return a, b
    p = np.unique(np.stack([a, b], axis=1), axis=0)
    return p[:, 0], p[:, 1]


# --------------------------------------------------------------- Path

def path_bisimilarity(model):
    """Path-bisimilarity: bounded-path endpoints are exactly the reach sets."""
    n_comp, comp = strong_components(model)
    cs, cd = comp[model.src], comp[model.dst]
    cross = cs != cd
    dag_s, dag_d = _unique_pairs(cs[cross], cd[cross])
    nodes = np.arange(model.n)

    def sig(cls):
        fwd = _propagate_sets(n_comp, comp, cls, dag_s, dag_d)
        bwd = _propagate_sets(n_comp, comp, cls, dag_d, dag_s)
        return _exact_key(cls, [_set_ids(fwd)[comp[nodes]], _set_ids(bwd)[comp[nodes]]])

    cls, _ = _refine(np.array(ap_partition(model).class_of), sig)
    return Partition(cls)


# --------------------------------------------------------------- CoPa

def _copa_signature(model):
    n = model.n
    src, dst = model.src, model.dst

    def sig(cls):
        inert = cls[src] == cls[dst]
        si, di = src[inert], dst[inert]
        g = csr_matrix((np.ones(si.size, dtype=np.int8), (si, di)), shape=(n, n))
        n_comp, comp = connected_components(g, directed=True, connection="strong")
        cs, cd = comp[si], comp[di]
        cross = cs != cd
        dag_s, dag_d = _unique_pairs(cs[cross], cd[cross])
        # every component sees its own class through the self-loop of R^r
        own_c = comp
        own_v = cls
        ex = ~inert
        fw_c, fw_v = _unique_pairs(np.concatenate([own_c, comp[src[ex]]]),
                                   np.concatenate([own_v, cls[dst[ex]]]))
        bw_c, bw_v = _unique_pairs(np.concatenate([own_c, comp[dst[ex]]]),
                                   np.concatenate([own_v, cls[src[ex]]]))
        fwd = _propagate_sets(n_comp, fw_c, fw_v, dag_s, dag_d)
        bwd = _propagate_sets(n_comp, bw_c, bw_v, dag_d, dag_s)
        return _exact_key(cls, [_set_ids(fwd)[comp], _set_ids(bwd)[comp]])

    return sig


def copa_bisimilarity(model):
    """CoPa-bisimilarity via stuttering equivalence with converse on ``R`` plus self-loops.

    A class ``C`` is in the forward signature of ``x`` when some walk leaves
    ``x``, stays inside the class of ``x`` and then takes one step into ``C``;
    the backward signature mirrors this along ``R^-1``.
    """
    cls, _ = _refine(np.array(ap_partition(model).class_of), _copa_signature(model))
    return Partition(cls)


def _relation_matrix(model, relation):
    if isinstance(relation, np.ndarray) and relation.dtype == bool:
        return relation
    b = np.zeros((model.n, model.n), dtype=bool)
    if isinstance(relation, Partition):
        relation = relation.pairs()
    for x, y in relation:
        b[model.id_of(x), model.id_of(y)] = True
    return b


def _reach_within(ptr, idx, x, allowed):
    seed = np.zeros(allowed.size, dtype=bool)
    seed[x] = True
    return _kernels.backward_lfp(ptr, idx, seed, allowed)


def _matched(b, left, right):
    """Every point of ``left`` has a partner in ``right`` and vice versa."""
    sub = b[np.ix_(left, right)]
    return bool(sub.any(axis=1).all() and sub.any(axis=0).all())


def is_copa_bisimulation(model, relation):
    """Check the CoPa transfer conditions for every pair of ``relation``.

    Forward paths from ``x1`` whose points before the last are related to
    ``x2`` end exactly in ``closure(W1)``, where ``W1`` is what ``x1``
    reaches through points related to ``x2``.  Backward paths are symmetric.
    """
    b = _relation_matrix(model, relation)
    if not b.any():
        return False
    labs = model.label_ids
    for x1, x2 in zip(*np.nonzero(b)):
        if labs[x1] != labs[x2]:
            return False
        a1, a2 = b[:, x2], b[x1, :]
        w1 = _reach_within(model.succ_ptr, model.succ_idx, x1, a1)
        w2 = _reach_within(model.succ_ptr, model.succ_idx, x2, a2)
        if not _matched(b, np.flatnonzero(closure(model, w1, "fwd")),
                        np.flatnonzero(closure(model, w2, "fwd"))):
            return False
        v1 = _reach_within(model.pred_ptr, model.pred_idx, x1, a1)
        v2 = _reach_within(model.pred_ptr, model.pred_idx, x2, a2)
        if not _matched(b, np.flatnonzero(closure(model, v1, "bwd")),
                        np.flatnonzero(closure(model, v2, "bwd"))):
            return False
    return True


# ---------------------------------------------------------------- traces

def trace_witness(model, x1, x2, max_states=2 ** 20):
    """A label word in one trace language but not the other, or ``None``.

    Returns ``(direction, word)`` where ``word`` is a list of label sets.
    Traces of bounded paths are decided on finite walk words over ``R`` plus
    self-loops: both languages are prefix-closed and closed under repeating
    the last letter, so equal finite languages means equal traces.
    """
    x1, x2 = model.id_of(x1), model.id_of(x2)
    labs = model.label_ids
    label_of = {int(labs[i]): model.labels[i] for i in range(model.n)}
    for direction, ptr, idx in (("fwd", model.succ_ptr, model.succ_idx),
                                ("bwd", model.pred_ptr, model.pred_idx)):
        word = _language_difference(labs, ptr, idx, x1, x2, max_states)
        if word is not None:
            return direction, [set(label_of[a]) for a in word]
    return None


def _language_difference(labs, ptr, idx, x1, x2, max_states):
    if labs[x1] != labs[x2]:
        return [int(labs[x1])]

    def step(states):
        out = {}
        for s in states:
            for v in (s, *idx[ptr[s]:ptr[s + 1]].tolist()):
                out.setdefault(int(labs[v]), set()).add(v)
        return {a: frozenset(v) for a, v in out.items()}

    start = (frozenset([x1]), frozenset([x2]))
    parent = {start: None}
    queue = deque([start])
    while queue:
        cur = queue.popleft()
        n1, n2 = step(cur[0]), step(cur[1])
        for a in sorted(set(n1) | set(n2)):
            if a not in n1 or a not in n2:
                word, node = [a], cur
                while node is not None:
                    prev = parent[node]
                    word.append(int(labs[next(iter(node[0]))]) if prev is None else prev[1])
                    node = prev[0] if prev is not None else None
                return word[::-1]
            nxt = (n1[a], n2[a])
            if nxt not in parent:
                if len(parent) >= max_states:
                    raise TooLargeError(f"trace check explored more than {max_states} state pairs")
                parent[nxt] = (cur, a)
                queue.append(nxt)
    return None


def trace_equivalent(model, x1, x2, max_states=2 ** 20):
    return trace_witness(model, x1, x2, max_states) is None


# ---------------------------------------------------------- homeomorphism

def _succ_sets(model):
    return [set(model.successors(x).tolist()) - {x} for x in range(model.n)]


def is_homeomorphism(model, h):
    """``h`` (a permutation array) preserves labels and singleton closures."""
    h = np.asarray(h)
    if sorted(h.tolist()) != list(range(model.n)):
        return False
    if np.any(model.label_ids[h] != model.label_ids):
        return False
    for x in range(model.n):
        e = np.zeros(model.n, dtype=bool)
        e[x] = True
        img = np.zeros(model.n, dtype=bool)
        img[h[np.flatnonzero(closure(model, e, "fwd"))]] = True
        e2 = np.zeros(model.n, dtype=bool)
        e2[h[x]] = True
        if not np.array_equal(img, closure(model, e2, "fwd")):
            return False
    return True


def find_homeomorphism(model, x1, x2, max_points=64):
    """A self-homeomorphism mapping ``x1`` to ``x2``, or ``None``.

    On a finite quasi-discrete model this is a label-preserving automorphism
    of ``R`` (self-loops ignored).  Candidates are restricted to the
    C-bisimilarity class, which every homeomorphism preserves.
    """
    if model.n > max_points:
        raise TooLargeError(f"homeomorphism search limited to {max_points} points, model has {model.n}")
    x1, x2 = model.id_of(x1), model.id_of(x2)
    cmc = c_bisimilarity(model).class_of
    if cmc[x1] != cmc[x2]:
        return None
    succ = _succ_sets(model)
    pred = [set(model.predecessors(x).tolist()) - {x} for x in range(model.n)]
    und = [succ[x] | pred[x] for x in range(model.n)]
    order, seen = [], set()
    for root in [x1] + list(range(model.n)):
        if root in seen:
            continue
        seen.add(root)
        queue = deque([root])
        while queue:
            v = queue.popleft()
            order.append(v)
            for w in sorted(und[v]):
                if w not in seen:
                    seen.add(w)
                    queue.append(w)
    cand = [[y for y in range(model.n) if cmc[y] == cmc[x]] for x in range(model.n)]
    h = [-1] * model.n
    used = [False] * model.n

    def consistent(x, y):
        for z in succ[x]:
            if h[z] >= 0 and h[z] not in succ[y]:
                return False
        for z in pred[x]:
            if h[z] >= 0 and h[z] not in pred[y]:
                return False
        return len(succ[x]) == len(succ[y]) and len(pred[x]) == len(pred[y])

    def search(k):
        if k == len(order):
            return True
        x = order[k]
        options = [x2] if k == 0 else cand[x]
        for y in options:
            if used[y] or not consistent(x, y):
                continue
            h[x], used[y] = y, True
            if search(k + 1):
                return True
            h[x], used[y] = -1, False
        return False

    if not search(0):
        return None
    result = np.array(h, dtype=np.int64)
    assert is_homeomorphism(model, result)
    return result


# --------------------------------------------------- distinguishing formulas

@dataclass(frozen=True)
class DistinguishingWitness:
    formula: object
    holds_at: str
    fails_at: str


def _conj(parts):
    parts = list(dict.fromkeys(parts))
    return parts[0] if len(parts) == 1 else And(tuple(parts))


def distinguish(model, x1, x2):
    """A formula with atoms, boolean connectives and ``N+``/``N-`` that holds at
    ``x1`` and fails at ``x2``, read off the C-bisimilarity refinement rounds."""
    x1, x2 = model.id_of(x1), model.id_of(x2)
    _, hist = c_bisimilarity(model, history=True)
    if hist[-1][x1] == hist[-1][x2]:
        raise NoWitnessError(f"{model.names[x1]} and {model.names[x2]} are C-bisimilar")
    reps = []
    for cls in hist:
        first = {}
        for v, c in enumerate(cls.tolist()):
            first.setdefault(c, v)
        reps.append(first)
    memo = {}

    def classes_of(cls, v, ptr, idx):
        return {int(cls[v])} | set(cls[idx[ptr[v]:ptr[v + 1]]].tolist())

    def delta(k, c, d):
        """Holds on all of round-k class ``c``, fails on all of round-k class ``d``."""
        rc, rd = reps[k][c], reps[k][d]
        j = next(i for i in range(k + 1) if hist[i][rc] != hist[i][rd])
        key = (j, int(hist[j][rc]), int(hist[j][rd]))
        if key in memo:
            return memo[key]
        if j == 0:
            la, lb = model.labels[rc], model.labels[rd]
            if la - lb:
                f = Atom(sorted(la - lb)[0])
            else:
                f = Not(Atom(sorted(lb - la)[0]))
        else:
            prev = hist[j - 1]
            f = None
            for ptr, idx, near in ((model.succ_ptr, model.succ_idx, NearBwd),
                                   (model.pred_ptr, model.pred_idx, NearFwd)):
                s1, s2 = classes_of(prev, rc, ptr, idx), classes_of(prev, rd, ptr, idx)
                if s1 == s2:
                    continue
                if s1 - s2:
                    e = min(s1 - s2)
                    f = near(_conj(delta(j - 1, e, other) for other in sorted(s2)))
                else:
                    e = min(s2 - s1)
                    f = Not(near(_conj(delta(j - 1, e, other) for other in sorted(s1))))
                break
            assert f is not None
        memo[key] = f
        return f

    last = len(hist) - 1
    f = delta(last, int(hist[last][x1]), int(hist[last][x2]))
    sat = evaluate(model, f)
    if not (sat[x1] and not sat[x2]):  # pragma: no cover - construction invariant
        raise AssertionError("distinguishing formula failed verification")
    return DistinguishingWitness(f, model.names[x1], model.names[x2])


# --------------------------------------------------------------- dispatch

_DECIDERS = {
    EquivalenceKind.AP: ap_equivalence,
    EquivalenceKind.CM: cm_bisimilarity,
    EquivalenceKind.CMC: c_bisimilarity,
    EquivalenceKind.PATH: path_bisimilarity,
    EquivalenceKind.COPA: copa_bisimilarity,
}


def equivalence(model, kind):
    try:
        kind = EquivalenceKind(kind)
    except ValueError:
        raise ModelError(f"unknown equivalence kind {kind!r}") from None
    return _DECIDERS[kind](model)


ALL_VERDICTS = ("ap", "cm", "cmc", "path", "copa", "trace", "homeo")


def compare(model, p1, p2, kinds=ALL_VERDICTS):
    """Verdict report for one pair of points."""
    x1, x2 = model.id_of(p1), model.id_of(p2)
    report = {"pair": [model.names[x1], model.names[x2]]}
    for k in kinds:
        if k == "trace":
            w = trace_witness(model, x1, x2)
            report["trace"] = w is None
            if w is not None:
                report["trace_witness"] = {"direction": w[0], "word": [sorted(s) for s in w[1]]}
        elif k == "homeo":
            report["homeo"] = find_homeomorphism(model, x1, x2) is not None
        else:
            report[k] = equivalence(model, k).same(x1, x2)
    return report
