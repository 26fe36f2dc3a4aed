"""Hot inner loops, each with a numba implementation and a pure-numpy twin.

The numba path is used when numba imports and ``CLOSUREBISIM_PURE_NUMPY`` is
unset (or ``0``).  Both paths return bit-identical results; the test suite
runs them side by side.
"""
import os

import numpy as np

try:
    from numba import njit
except ImportError:  # pragma: no cover - exercised only without numba
    njit = None

PURE_NUMPY = os.environ.get("CLOSUREBISIM_PURE_NUMPY", "") not in ("", "0")
USE_NUMBA = njit is not None and not PURE_NUMPY

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)


def backend_name():
    return "numba" if USE_NUMBA else "numpy"


# ---------------------------------------------------------------- numpy path

def _mix_np(x):
    with np.errstate(over="ignore"):
        z = x.astype(np.uint64) + _GOLDEN
        z = (z ^ (z >> _S30)) * _MIX1
        z = (z ^ (z >> _S27)) * _MIX2
        return z ^ (z >> _S31)


def _owners(ptr):
    return np.repeat(np.arange(len(ptr) - 1, dtype=np.int64), np.diff(ptr))


def backward_lfp_np(pred_ptr, pred_idx, seed, allowed):
    """Least fixpoint of ``B = seed | (allowed & pre(B))``, frontier by frontier."""
    out = seed.copy()
    owner = _owners(pred_ptr)
    frontier = seed.copy()
    while frontier.any():
        sel = frontier[owner]
        cand = pred_idx[sel]
        cand = cand[allowed[cand] & ~out[cand]]
        if cand.size == 0:
            break
        out[cand] = True
        frontier = np.zeros_like(out)
        frontier[cand] = True
    return out


def _unique_owner_class(ptr, idx, cls, include_self):
    n = len(ptr) - 1
    owner = _owners(ptr)
    c = cls[idx]
    if include_self:
        owner = np.concatenate([owner, np.arange(n, dtype=np.int64)])
        c = np.concatenate([c, cls])
    width = np.int64(cls.max() + 1 if cls.size else 1)
    key = np.unique(owner * width + c)
    return key // width, key % width


def class_set_hash_np(ptr, idx, cls, include_self):
    n = len(ptr) - 1
    out = np.zeros(n, dtype=np.uint64)
    own, cc = _unique_owner_class(ptr, idx, cls, include_self)
    if own.size == 0:
        return out
    h = _mix_np(cc)
    starts = np.flatnonzero(np.r_[True, own[1:] != own[:-1]])
    with np.errstate(over="ignore"):
        out[own[starts]] = np.add.reduceat(h, starts)
    return out


_C1 = np.uint64(0xD6E8FEB86659FD93)
_C2 = np.uint64(0xA0761D6478BD642F)


def neighbour_key_np(succ_ptr, succ_idx, pred_ptr, pred_idx, cls, use_fwd, use_bwd):
    """One 64-bit key per node mixing its class and its neighbour class-set hashes."""
    with np.errstate(over="ignore"):
        k = _mix_np(cls)
        if use_fwd:
            k = _mix_np(k ^ (class_set_hash_np(succ_ptr, succ_idx, cls, True) * _C1))
        if use_bwd:
            k = _mix_np(k ^ (class_set_hash_np(pred_ptr, pred_idx, cls, True) * _C2))
    return k


def class_sets_uniform(ptr, idx, cls, include_self, groups):
    """Exact check: within each group every node sees the same set of classes.

    Each node's set is a subset of its group's union, so the sets coincide
    iff every node's set is as large as the union.
    """
    own, cc = _unique_owner_class(ptr, idx, cls, include_self)
    n = len(ptr) - 1
    per_node = np.bincount(own, minlength=n)
    g = groups[own]
    width = np.int64(cls.max() + 1 if cls.size else 1)
    gkey = np.unique(g * width + cc)
    per_group = np.bincount(gkey // width, minlength=int(groups.max()) + 1)
    return bool(np.all(per_node == per_group[groups]))


# ---------------------------------------------------------------- numba path

if njit is not None:

    @njit(cache=True)
    def _mix_nb(x):
        z = x + np.uint64(0x9E3779B97F4A7C15)
        z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
        return z ^ (z >> np.uint64(31))

    @njit(cache=True)
    def backward_lfp_nb(pred_ptr, pred_idx, seed, allowed):
        n = seed.shape[0]
        out = seed.copy()
        stack = np.empty(n, dtype=np.int64)
        top = 0
        for v in range(n):
            if seed[v]:
                stack[top] = v
                top += 1
        while top > 0:
            top -= 1
            v = stack[top]
            for e in range(pred_ptr[v], pred_ptr[v + 1]):
                u = pred_idx[e]
                if allowed[u] and not out[u]:
                    out[u] = True
                    stack[top] = u
                    top += 1
        return out

    @njit(cache=True)
    def class_set_hash_nb(ptr, idx, cls, include_self):
        n = ptr.shape[0] - 1
        out = np.zeros(n, dtype=np.uint64)
        maxdeg = 0
        for v in range(n):
            d = ptr[v + 1] - ptr[v]
            if d > maxdeg:
                maxdeg = d
        buf = np.empty(maxdeg + 1, dtype=np.int64)
        for v in range(n):
            k = 0
            if include_self:
                buf[0] = cls[v]
                k = 1
            for e in range(ptr[v], ptr[v + 1]):
                buf[k] = cls[idx[e]]
                k += 1
            s = np.sort(buf[:k])
            h = np.uint64(0)
            for i in range(k):
                if i == 0 or s[i] != s[i - 1]:
                    h += _mix_nb(np.uint64(s[i]))
            out[v] = h
        return out
    @njit(cache=True)
    def _set_hash_nb(ptr, idx, cls, v, buf):
        # distinct classes among v and its neighbours; degrees are small, so
        # a linear membership scan beats sorting
        buf[0] = cls[v]
        k = 1
        h = _mix_nb(np.uint64(cls[v]))
        for e in range(ptr[v], ptr[v + 1]):
            c = cls[idx[e]]
            seen = False
            for i in range(k):
                if buf[i] == c:
                    seen = True
                    break
            if not seen:
                buf[k] = c
                k += 1
                h += _mix_nb(np.uint64(c))
        return h

    @njit(cache=True)
    def neighbour_key_nb(succ_ptr, succ_idx, pred_ptr, pred_idx, cls, use_fwd, use_bwd):
        n = cls.shape[0]
        maxdeg = 0
        for v in range(n):
            maxdeg = max(maxdeg, succ_ptr[v + 1] - succ_ptr[v], pred_ptr[v + 1] - pred_ptr[v])
        buf = np.empty(maxdeg + 1, dtype=np.int64)
        out = np.empty(n, dtype=np.uint64)
        c1 = np.uint64(0xD6E8FEB86659FD93)
        c2 = np.uint64(0xA0761D6478BD642F)
        for v in range(n):
            k = _mix_nb(np.uint64(cls[v]))
            if use_fwd:
                k = _mix_nb(k ^ (_set_hash_nb(succ_ptr, succ_idx, cls, v, buf) * c1))
            if use_bwd:
                k = _mix_nb(k ^ (_set_hash_nb(pred_ptr, pred_idx, cls, v, buf) * c2))
            out[v] = k
        return out
else:  # pragma: no cover
    backward_lfp_nb = None
    class_set_hash_nb = None
    neighbour_key_nb = None


def backward_lfp(pred_ptr, pred_idx, seed, allowed):
    if USE_NUMBA:
        return backward_lfp_nb(pred_ptr, pred_idx, seed, allowed)
    return backward_lfp_np(pred_ptr, pred_idx, seed, allowed)


def class_set_hash(ptr, idx, cls, include_self=True):
    if USE_NUMBA:
        return class_set_hash_nb(ptr, idx, cls, include_self)
    return class_set_hash_np(ptr, idx, cls, include_self)


def neighbour_key(succ_ptr, succ_idx, pred_ptr, pred_idx, cls, use_fwd=True, use_bwd=True):
    if USE_NUMBA:
        return neighbour_key_nb(succ_ptr, succ_idx, pred_ptr, pred_idx, cls, use_fwd, use_bwd)
    return neighbour_key_np(succ_ptr, succ_idx, pred_ptr, pred_idx, cls, use_fwd, use_bwd)
