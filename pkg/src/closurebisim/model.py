"""Finite quasi-discrete closure models and the operators defined on them.

A model is a finite set of points, a binary relation ``R`` and a valuation of
atomic propositions.  Every finite closure space is quasi-discrete (binary
additivity plus ``C(empty) = empty`` gives ``C(A) = union of C({x})``), so the
relation-based representation loses nothing at this scale.

Point sets are numpy boolean arrays of width ``model.n``.
"""
from dataclasses import dataclass

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from . import _kernels
from .errors import InvalidPartitionError, ModelError

FWD = "fwd"
BWD = "bwd"
DIRECTIONS = (FWD, BWD)


def _csr(n, src, dst):
    order = np.lexsort((dst, src))
    ptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(np.bincount(src, minlength=n), out=ptr[1:])
    return ptr, np.ascontiguousarray(dst[order], dtype=np.int64)


class QdModel:
    """Immutable quasi-discrete closure model.

    Points are dense integer ids ``0..n-1``; ``names[i]`` is the external name
    of point ``i``.  Edges are deduplicated.  Self-loops are kept as given:
    they do not change the closure operator but they are part of ``R``.
    """

    __slots__ = ("names", "index", "src", "dst", "succ_ptr", "succ_idx",
                 "pred_ptr", "pred_idx", "valuation", "labels", "label_ids",
                 "_reversed")

    def __init__(self, names, edges, valuation):
        names = tuple(str(s) for s in names)
        if not names:
            raise ModelError("a closure model needs at least one point")
        index = {}
        for i, s in enumerate(names):
            if s in index:
                raise ModelError(f"duplicate point id {s!r}")
            index[s] = i
        n = len(names)
        e = np.asarray(list(edges), dtype=np.int64).reshape(-1, 2)
        if e.size and (e.min() < 0 or e.max() >= n):
            raise ModelError("edge endpoint is not a valid point id")
        if e.size:
            e = np.unique(e, axis=0)
        src = np.ascontiguousarray(e[:, 0])
        dst = np.ascontiguousarray(e[:, 1])

        val = {}
        for p, members in valuation.items():
            mask = np.zeros(n, dtype=bool)
            ids = np.asarray(list(members), dtype=np.int64)
            if ids.size and (ids.min() < 0 or ids.max() >= n):
                raise ModelError(f"valuation of {p!r} mentions an unknown point")
            mask[ids] = True
            mask.flags.writeable = False
            val[str(p)] = mask

        self.names = names
        self.index = index
        self.src, self.dst = src, dst
        self.succ_ptr, self.succ_idx = _csr(n, src, dst)
        self.pred_ptr, self.pred_idx = _csr(n, dst, src)
        self.valuation = val
        props = sorted(val)
        labels = [frozenset(p for p in props if val[p][i]) for i in range(n)]
        self.labels = tuple(labels)
        keys = {}
        ids = np.empty(n, dtype=np.int64)
        for i, lab in enumerate(labels):
            ids[i] = keys.setdefault(tuple(sorted(lab)), len(keys))
        self.label_ids = ids
        self._reversed = None
        for arr in (src, dst, self.succ_ptr, self.succ_idx, self.pred_ptr,
                    self.pred_idx, ids):
            arr.flags.writeable = False

    @classmethod
    def from_named(cls, points, edges=()):
        """Build from ``{name: props}`` (or ``[(name, props)]``) and named edges."""
        items = list(points.items()) if isinstance(points, dict) else list(points)
        names = [name for name, _ in items]
        index = {name: i for i, name in enumerate(names)}
        valuation = {}
        for name, props in items:
            for p in props:
                valuation.setdefault(p, []).append(index[name])
        try:
            e = [(index[a], index[b]) for a, b in edges]
        except KeyError as exc:
            raise ModelError(f"edge mentions unknown point {exc.args[0]!r}") from None
        return cls(names, e, valuation)

    @property
    def n(self):
        return len(self.names)

    @property
    def n_edges(self):
        return int(self.src.size)

    @property
    def props(self):
        return tuple(sorted(self.valuation))

    def __len__(self):
        return self.n

    def __repr__(self):
        return f"QdModel(n={self.n}, edges={self.n_edges}, props={list(self.props)})"

    def edges(self):
        return list(zip(self.src.tolist(), self.dst.tolist()))

    def id_of(self, point):
        """Accept an integer id or an external name."""
        if isinstance(point, (int, np.integer)) and not isinstance(point, bool):
            if 0 <= point < self.n:
                return int(point)
            raise ModelError(f"invalid point id {point}")
        try:
            return self.index[point]
        except KeyError:
            raise ModelError(f"unknown point {point!r}") from None

    def successors(self, x):
        return self.succ_idx[self.succ_ptr[x]:self.succ_ptr[x + 1]]

    def predecessors(self, x):
        return self.pred_idx[self.pred_ptr[x]:self.pred_ptr[x + 1]]

    def prop_set(self, p):
        """Points where ``p`` holds; unknown propositions hold nowhere."""
        v = self.valuation.get(p)
        return v.copy() if v is not None else np.zeros(self.n, dtype=bool)

    def reversed(self):
        """The same points and valuation over ``R^-1``."""
        if self._reversed is None:
            val = {p: np.flatnonzero(m) for p, m in self.valuation.items()}
            rev = QdModel(self.names, zip(self.dst.tolist(), self.src.tolist()), val)
            rev._reversed = self
            self._reversed = rev
        return self._reversed

    def adjacency(self):
        data = np.ones(self.src.size, dtype=np.int8)
        return csr_matrix((data, (self.src, self.dst)), shape=(self.n, self.n))

    def point_set(self, points=()):
        mask = np.zeros(self.n, dtype=bool)
        for x in points:
            mask[self.id_of(x)] = True
        return mask

    def names_of(self, mask):
        return [self.names[i] for i in np.flatnonzero(mask)]


def _check_set(model, a):
    a = np.asarray(a)
    if a.dtype != bool or a.shape != (model.n,):
        raise ModelError(f"point set of shape {a.shape} does not match a model with {model.n} points")
    return a


def _check_dir(direction):
    if direction not in DIRECTIONS:
        raise ModelError(f"direction must be 'fwd' or 'bwd', not {direction!r}")


def closure(model, a, direction=FWD):
    """``A`` plus its R-successors (fwd) or R-predecessors (bwd)."""
    a = _check_set(model, a)
    _check_dir(direction)
    out = a.copy()
    if direction == FWD:
        out[model.dst[a[model.src]]] = True
    else:
        out[model.src[a[model.dst]]] = True
    return out


def interior(model, a, direction=FWD):
    a = _check_set(model, a)
    return ~closure(model, ~a, direction)


def min_neighbourhood(model, x):
    """Smallest ``S`` with ``x`` in the forward interior of ``S``: ``{x}`` plus predecessors."""
    x = model.id_of(x)
    s = np.zeros(model.n, dtype=bool)
    s[x] = True
    s[model.predecessors(x)] = True
    return s


def reach_set(model, seed, direction=FWD):
    """Points reachable from (fwd) or reaching (bwd) some point of ``seed``."""
    seed = _check_set(model, seed)
    _check_dir(direction)
    allowed = np.ones(model.n, dtype=bool)
    if direction == FWD:
        return _kernels.backward_lfp(model.succ_ptr, model.succ_idx, seed, allowed)
    return _kernels.backward_lfp(model.pred_ptr, model.pred_idx, seed, allowed)


def reach(model, x, direction=FWD):
    """Endpoints of bounded paths from ``x`` (fwd) or start points of paths into ``x`` (bwd)."""
    seed = np.zeros(model.n, dtype=bool)
    seed[model.id_of(x)] = True
    return reach_set(model, seed, direction)


def is_walk(model, walk):
    """Each step either stutters or follows an R-edge."""
    w = [model.id_of(x) for x in walk]
    if not w:
        raise ModelError("a walk is a non-empty sequence of points")
    for a, b in zip(w, w[1:]):
        if a != b and b not in model.successors(a):
            return False
    return True


class Partition:
    """Equivalence classes over ``0..n-1``, numbered by their smallest member."""

    __slots__ = ("class_of", "classes")

    def __init__(self, keys):
        keys = np.asarray(keys)
        if keys.ndim == 2:
            _, inverse = np.unique(keys, axis=0, return_inverse=True)
        else:
            _, inverse = np.unique(keys, return_inverse=True)
        inverse = inverse.reshape(-1)
        _, first = np.unique(inverse, return_index=True)
        rank = np.empty(first.size, dtype=np.int64)
        rank[np.argsort(first, kind="stable")] = np.arange(first.size)
        class_of = rank[inverse]
        class_of.flags.writeable = False
        self.class_of = class_of
        order = np.argsort(class_of, kind="stable")
        bounds = np.cumsum(np.bincount(class_of))[:-1]
        self.classes = tuple(np.split(order, bounds))

    @classmethod
    def from_classes(cls, classes, n):
        class_of = np.full(n, -1, dtype=np.int64)
        for k, members in enumerate(classes):
            members = list(members)
            if not members:
                raise InvalidPartitionError("partition classes must be non-empty")
            if np.any(class_of[members] >= 0):
                raise InvalidPartitionError("partition classes overlap")
            class_of[members] = k
        if np.any(class_of < 0):
            raise InvalidPartitionError("partition does not cover every point")
        return cls(class_of)

    @classmethod
    def identity(cls, n):
        return cls(np.arange(n))

    @property
    def n(self):
        return int(self.class_of.size)

    def __len__(self):
        return len(self.classes)

    def __eq__(self, other):
        return isinstance(other, Partition) and np.array_equal(self.class_of, other.class_of)

    def __hash__(self):
        return hash(self.class_of.tobytes())

    def __repr__(self):
        return f"Partition({[c.tolist() for c in self.classes]})"

    def same(self, x, y):
        return bool(self.class_of[x] == self.class_of[y])

    def refines(self, other):
        """Every class of ``self`` lies inside one class of ``other``."""
        joint = Partition(np.stack([self.class_of, other.class_of], axis=1))
        return len(joint) == len(self)

    def pairs(self):
        return {(int(a), int(b)) for c in self.classes for a in c for b in c}

    def class_names(self, model):
        return [[model.names[i] for i in c] for c in self.classes]


def ap_partition(model):
    return Partition(model.label_ids)


def quotient(model, partition):
    """Collapse each class to one point; returns ``(quotient, projection)``.

    Quotient points are named ``q0, q1, ...`` in the lexicographic order of
    each class's least member name.
    """
    if partition.n != model.n:
        raise InvalidPartitionError("partition width does not match the model")
    labs = model.label_ids
    for c in partition.classes:
        if np.any(labs[c] != labs[c[0]]):
            raise InvalidPartitionError(
                f"class containing {model.names[c[0]]!r} mixes atomic propositions")
    least = [min(model.names[i] for i in c) for c in partition.classes]
    order = sorted(range(len(least)), key=least.__getitem__)
    newid = np.empty(len(order), dtype=np.int64)
    newid[order] = np.arange(len(order))
    proj = newid[partition.class_of]
    edges = np.unique(np.stack([proj[model.src], proj[model.dst]], axis=1), axis=0)
    reps = [partition.classes[k][0] for k in order]
    val = {p: [q for q, r in enumerate(reps) if m[r]] for p, m in model.valuation.items()}
    qm = QdModel([f"q{i}" for i in range(len(order))], edges.tolist(), val)
    proj.flags.writeable = False
    return qm, proj


def disjoint_union(m1, m2):
    """Side-by-side union; returns ``(union, inj1, inj2)`` as id arrays."""
    names = [f"0:{s}" for s in m1.names] + [f"1:{s}" for s in m2.names]
    off = m1.n
    edges = m1.edges() + [(a + off, b + off) for a, b in m2.edges()]
    val = {}
    for p, m in m1.valuation.items():
        val.setdefault(p, []).extend(np.flatnonzero(m).tolist())
    for p, m in m2.valuation.items():
        val.setdefault(p, []).extend((np.flatnonzero(m) + off).tolist())
    u = QdModel(names, edges, val)
    return u, np.arange(m1.n), np.arange(m2.n) + off


def is_connected(model):
    # A1, A2 are separated iff no R-edge joins them in either direction.
    k, _ = connected_components(model.adjacency(), directed=True, connection="weak")
    return k == 1


def is_path_connected(model):
    k, _ = connected_components(model.adjacency(), directed=True, connection="strong")
    return k == 1


def strong_components(model):
    return connected_components(model.adjacency(), directed=True, connection="strong")


@dataclass(frozen=True)
class Finding:
    level: str  # "error" or "warning" or "info"
    message: str


def validate(model, axioms=False, max_axiom_points=12):
    """Representation checks for a model or a raw model document.

    With ``axioms=True`` and at most ``max_axiom_points`` points the closure
    axioms and additivity are checked over all subsets, and idempotence is
    reported (as ``info``) when it fails.
    """
    if isinstance(model, dict):
        findings = _validate_document(model)
        if any(f.level == "error" for f in findings):
            return findings
        from .io import model_from_dict
        model = model_from_dict(model)
    else:
        findings = []
    for p, m in model.valuation.items():
        if m.shape != (model.n,):
            findings.append(Finding("error", f"valuation of {p!r} has wrong width"))
    if model.src.size and (model.src.max() >= model.n or model.dst.max() >= model.n):
        findings.append(Finding("error", "edge endpoint out of range"))
    if np.unique(np.stack([model.src, model.dst], 1), axis=0).shape[0] != model.src.size:
        findings.append(Finding("error", "duplicate edges"))
    if axioms:
        if model.n > max_axiom_points:
            findings.append(Finding("warning",
                                    f"axiom enumeration skipped: {model.n} > {max_axiom_points} points"))
        else:
            findings.extend(_axiom_findings(model))
    return findings


def _validate_document(doc):
    out = []
    ids = []
    for k, pt in enumerate(doc.get("points", [])):
        if not isinstance(pt, dict) or "id" not in pt:
            out.append(Finding("error", f"points[{k}] has no id"))
            continue
        ids.append(pt["id"])
    seen = set()
    for s in ids:
        if s in seen:
            out.append(Finding("error", f"duplicate point id {s!r}"))
        seen.add(s)
    if not ids:
        out.append(Finding("error", "model has no points"))
    for k, e in enumerate(doc.get("edges", [])):
        if not (isinstance(e, (list, tuple)) and len(e) == 2):
            out.append(Finding("error", f"edges[{k}] is not a pair"))
            continue
        for end in e:
            if end not in seen:
                out.append(Finding("error", f"edges[{k}] refers to unknown point {end!r}"))
    return out


def subset_closures(model, direction=FWD):
    """Closure of every subset, as integer bitmasks indexed by subset bitmask."""
    n = model.n
    single = np.zeros(n, dtype=np.int64)
    for x in range(n):
        e = np.zeros(n, dtype=bool)
        e[x] = True
        c = closure(model, e, direction)
        single[x] = int(np.sum(1 << np.flatnonzero(c).astype(np.int64)))
    masks = np.arange(1 << n, dtype=np.int64)
    out = np.zeros(1 << n, dtype=np.int64)
    for x in range(n):
        has = (masks >> x) & 1
        out |= np.where(has == 1, single[x], 0)
    return out


def _mask_closure_direct(model, mask, direction):
    a = np.array([(mask >> i) & 1 for i in range(model.n)], dtype=bool)
    c = closure(model, a, direction)
    return int(sum(1 << int(i) for i in np.flatnonzero(c)))


def _axiom_findings(model):
    out = []
    n = model.n
    full = (1 << n) - 1
    for d in DIRECTIONS:
        # Closures computed set-by-set, independently of the additive shortcut.
        cl = np.array([_mask_closure_direct(model, m, d) for m in range(1 << n)], dtype=np.int64)
        if cl[0] != 0:
            out.append(Finding("error", f"{d}: C(empty) is not empty"))
        masks = np.arange(1 << n, dtype=np.int64)
        if np.any((cl & masks) != masks):
            out.append(Finding("error", f"{d}: A is not contained in C(A)"))
        for a in range(1 << n):
            if np.any(cl[a | masks] != (cl[a] | cl)):
                out.append(Finding("error", f"{d}: additivity fails for A={a:b}"))
                break
        if np.any(cl[cl] != cl):
            out.append(Finding("info", f"{d}: closure is not idempotent (not topological)"))
        interior_ = full & ~cl[full & ~masks]
        if np.any((interior_ & masks) != interior_):
            out.append(Finding("error", f"{d}: interior not contained in A"))
    return out

