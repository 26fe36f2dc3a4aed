"""Acceptance criteria 1-13.

Each test carries ``@pytest.mark.criterion(n)``; the terminal summary prints
one ``criterion NN: PASS/FAIL`` line per criterion.  Run alone with
``pytest tests/test_acceptance.py``.
"""
import json
import time
import warnings

import numpy as np
import pytest

from closurebisim import equivalences as E
from closurebisim import oracles as O
from closurebisim.generators import random_formula, random_model
from closurebisim.io import (fixture_path, image_to_model, load_fixture, model_from_dict,
                             model_to_dict, palette_from_dict, write_netpbm)
from closurebisim.logic import (FALSE, TRUE, And, Atom, Bottom, NearBwd, NearFwd, Not, Or,
                                Propagate, RhoBwd, RhoFwd, SigmaBwd, SigmaFwd, Surround, Top,
                                ZetaFwd, ZetaBwd, evaluate, parse, subformulas, to_text)
from closurebisim.maze import EXITS, PALETTE, STARTS, upscale
from closurebisim.minimize import minimize, verify_quotient
from closurebisim.model import closure, interior, is_walk, validate

from .conftest import FIGURES, random_corpus

criterion = pytest.mark.criterion


def bits(mask, n):
    return np.array([(mask >> i) & 1 for i in range(n)], dtype=bool)


def edge_closure(model, a, backward):
    # closure read straight off the edge list
    out = set(np.flatnonzero(a).tolist())
    for s, t in model.edges():
        if backward and a[t]:
            out.add(s)
        if not backward and a[s]:
            out.add(t)
    return out


# ---------------------------------------------------------------- 1 axioms

AXIOM_CORPUS = random_corpus(101, 100, max_points=12) + \
    [random_model(np.random.default_rng(102 + i), n=int(np.random.default_rng(i).integers(13, 65)))
     for i in range(100)]


def _check_axioms_on(model, subsets):
    n = model.n
    empty = np.zeros(n, dtype=bool)
    for d, back in (("fwd", False), ("bwd", True)):
        assert not closure(model, empty, d).any()
        cl = [closure(model, a, d) for a in subsets]
        for a, c in zip(subsets, cl):
            assert (c | ~a).all()                                    # A in C(A)
            assert set(np.flatnonzero(c).tolist()) == edge_closure(model, a, back)
            assert np.array_equal(interior(model, a, d), ~closure(model, ~a, d))
        for i in range(len(subsets)):
            a = subsets[i]
            for j in range(i, min(len(subsets), i + 8)):
                b = subsets[j]
                assert np.array_equal(closure(model, a | b, d), cl[i] | cl[j])
                if (a | ~b).all():                                   # b subset of a
                    assert (cl[i] | ~cl[j]).all()
                    assert (interior(model, a, d) | ~interior(model, b, d)).all()
    # item 2 and item 3 of the closure/path correspondence
    fwd_single = [closure(model, bits(1 << x, n), "fwd") for x in range(n)]
    bwd_single = [closure(model, bits(1 << x, n), "bwd") for x in range(n)]
    for x1 in range(n):
        for x2 in range(n):
            assert bwd_single[x2][x1] == fwd_single[x1][x2]
    for a in subsets[:16]:
        expect = np.array([bool((fwd_single[x] & a).any()) for x in range(n)])
        assert np.array_equal(closure(model, a, "bwd"), expect)


@criterion(1)
@pytest.mark.parametrize("k", range(0, 200, 20))
def test_closure_axioms(k):
    rng = np.random.default_rng(k)
    for model in AXIOM_CORPUS[k:k + 20]:
        n = model.n
        if n <= 12:
            subsets = [bits(m, n) for m in range(1 << n)]
            if n > 8:
                subsets = [subsets[i] for i in rng.choice(len(subsets), 300, replace=False)]
            found = validate(model, axioms=True)
            assert not [f for f in found if f.level == "error"], found
        else:
            subsets = list(rng.random((60, n)) < rng.uniform(0.1, 0.9, (60, 1)))
        _check_axioms_on(model, subsets)


@criterion(1)
def test_idempotence_fails_on_chain():
    chain = load_fixture("chain3")
    a = chain.point_set(["a"])
    once = closure(chain, a)
    assert chain.names_of(once) == ["a", "b"]
    assert chain.names_of(closure(chain, once)) == ["a", "b", "c"]
    assert any(f.level == "info" and "idempotent" in f.message for f in validate(chain, axioms=True))


# ---------------------------------------------------------------- 2 walks

@criterion(2)
def test_walks_match_closure_membership():
    rng = np.random.default_rng(2)
    for model in random_corpus(2, 60, max_points=12):
        n = model.n
        fwd = [closure(model, bits(1 << x, n), "fwd") for x in range(n)]
        bwd = [closure(model, bits(1 << x, n), "bwd") for x in range(n)]
        for k in range(1000):
            length = int(rng.integers(1, 9))
            w = [int(rng.integers(n))]
            for _ in range(length - 1):
                if k % 2 == 0:
                    # biased towards real walks so both verdicts occur
                    nxt = np.flatnonzero(fwd[w[-1]])
                    w.append(int(rng.choice(nxt)) if rng.random() < 0.9 else int(rng.integers(n)))
                else:
                    w.append(int(rng.integers(n)))
            expect = all(fwd[w[i - 1]][w[i]] and bwd[w[i]][w[i - 1]] for i in range(1, len(w)))
            assert is_walk(model, w) == expect


# ---------------------------------------------------------------- 3, 4 identities

def formula_corpus(seed, count=200):
    rng = np.random.default_rng(seed)
    models = random_corpus(seed, count, max_points=12)
    return [(m, random_formula(rng, m.props, depth=int(rng.integers(0, 5)))) for m in models]


FORMULA_CORPUS = formula_corpus(3)


@criterion(3)
def test_near_is_reach_to_false():
    for m, f in FORMULA_CORPUS:
        assert np.array_equal(evaluate(m, NearFwd(f)), evaluate(m, RhoBwd(f, FALSE)))
        assert np.array_equal(evaluate(m, NearBwd(f)), evaluate(m, RhoFwd(f, FALSE)))


@criterion(4)
def test_sigma_is_rho_and_zeta_with_true():
    for m, f in FORMULA_CORPUS:
        for sigma, rho, zeta in ((SigmaFwd, RhoFwd, ZetaFwd), (SigmaBwd, RhoBwd, ZetaBwd)):
            s = evaluate(m, sigma(f))
            assert np.array_equal(s, evaluate(m, rho(f, TRUE)))
            assert np.array_equal(s, evaluate(m, zeta(f, TRUE)))


# ---------------------------------------------------------------- 5 S and P

@criterion(5)
def test_surround_and_propagate_against_walk_oracles():
    rng = np.random.default_rng(5)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        for m in random_corpus(5, 300, max_points=7):
            a = random_formula(rng, m.props, depth=2)
            b = random_formula(rng, m.props, depth=2)
            for f in (Surround(a, b), Propagate(a, b)):
                assert np.array_equal(evaluate(m, f), O.oracle_evaluate(m, f)), to_text(f)


# ---------------------------------------------------------------- 6 zeta edge case

def find_zeta_counterexample():
    """First corpus entry where the literal target-and-reach reading of zeta fails."""
    rng = np.random.default_rng(6)
    for m, a, b in ((m, random_formula(rng, m.props, 1), random_formula(rng, m.props, 1))
                    for m in random_corpus(6, 500, max_points=4)):
        lhs = evaluate(m, ZetaFwd(a, b))
        literal = evaluate(m, And((b, RhoFwd(a, b))))
        bad = np.flatnonzero(lhs != literal)
        if bad.size:
            return {"model": model_to_dict(m), "phi1": to_text(a), "phi2": to_text(b),
                    "point": m.names[bad[0]]}
    return None


@criterion(6)
def test_zeta_literal_identity_counterexample(tmp_path):
    found = find_zeta_counterexample()
    assert found is not None
    out = tmp_path / "zeta_counterexample.json"
    out.write_text(json.dumps(found, indent=2, sort_keys=True) + "\n")
    with open(fixture_path("zeta_counterexample.json")) as fh:
        committed = json.load(fh)
    assert committed == json.loads(out.read_text())

    m = model_from_dict(committed["model"])
    a, b = parse(committed["phi1"]), parse(committed["phi2"])
    x = m.id_of(committed["point"])
    assert evaluate(m, ZetaFwd(a, b))[x]
    assert not evaluate(m, And((b, RhoFwd(a, b))))[x]
    assert evaluate(m, a)[x] and not evaluate(m, b)[x]   # a target point outside the via set


@criterion(6)
def test_zeta_corrected_identity_on_corpus():
    rng = np.random.default_rng(61)
    for m, f in FORMULA_CORPUS:
        g = random_formula(rng, m.props, depth=2)
        for zeta, rho in ((ZetaFwd, RhoFwd), (ZetaBwd, RhoBwd)):
            assert np.array_equal(evaluate(m, zeta(f, g)), evaluate(m, Or((f, And((g, rho(f, g)))))))


# ---------------------------------------------------------------- 7 fixtures

FIXTURE_VERDICTS = [
    ("fig2", "x11", "x21", {"cm": True, "homeo": False}),
    ("fig3", "u11", "u21", {"cm": True, "cmc": False}),
    ("fig4", "y11", "y21", {"trace": True, "cmc": False, "path": False}),
    ("fig6", "x11", "x21", {"path": True, "copa": True, "cmc": False, "trace": False}),
    ("fig8", "t11", "t21", {"path": True, "copa": False}),
    ("fig10", "v12", "v22", {"cmc": False}),
]


@criterion(7)
@pytest.mark.parametrize("name,a,b,expect", FIXTURE_VERDICTS)
def test_fixture_verdicts(name, a, b, expect):
    report = E.compare(load_fixture(name), a, b, list(expect))
    assert {k: report[k] for k in expect} == expect
    if name == "fig6":
        assert report["trace_witness"]["word"] == [["r"], ["b"]]


# ---------------------------------------------------------------- 8 hierarchy

HIERARCHY_CORPUS = random_corpus(8, 100, max_points=12)


@criterion(8)
def test_hierarchy_inclusions():
    for m in HIERARCHY_CORPUS:
        ap = E.ap_equivalence(m)
        cm = E.cm_bisimilarity(m)
        cmc = E.cmc_bisimilarity(m)
        path = E.path_bisimilarity(m)
        copa = E.copa_bisimilarity(m)
        assert cmc.refines(cm) and cmc.refines(copa)
        assert copa.refines(path) and path.refines(ap) and cm.refines(ap)
        for x in range(m.n):
            for y in range(x + 1, m.n):
                if cmc.same(x, y):
                    assert E.trace_equivalent(m, x, y)
                if E.find_homeomorphism(m, x, y) is not None:
                    assert cm.same(x, y)


# ---------------------------------------------------------------- 9 agreement

@criterion(9)
def test_refinement_matches_pair_gfp_oracles():
    for m in random_corpus(9, 100, max_points=12):
        assert E.cm_bisimilarity(m) == O.relation_to_partition(O.cm_minimal_oracle(m))
        cmc = E.cmc_bisimilarity(m)
        assert cmc == O.relation_to_partition(O.c_bisim_oracle(m))
        assert E.path_bisimilarity(m) == O.relation_to_partition(O.path_oracle(m))
        copa = E.copa_bisimilarity(m)
        assert copa == O.relation_to_partition(O.dbsc_oracle(m))
        assert E.is_copa_bisimulation(m, copa)
        if m.n <= 8:
            # neighbourhood-enumeration definitions, exponential, so tiny models only
            assert E.cm_bisimilarity(m) == O.relation_to_partition(O.cm_neighbourhood_oracle(m))
            assert cmc == O.relation_to_partition(O.cmc_neighbourhood_oracle(m))


# ---------------------------------------------------------------- 10 logics

IMLC_NODES = (Top, Bottom, Atom, Not, And, Or, NearFwd, NearBwd)


@criterion(10)
@pytest.mark.parametrize("name", FIGURES)
def test_distinguishing_witnesses(name):
    m = load_fixture(name)
    cmc = E.cmc_bisimilarity(m)
    for x in range(m.n):
        for y in range(m.n):
            if cmc.same(x, y):
                continue
            w = E.distinguish(m, x, y)
            assert all(isinstance(g, IMLC_NODES) for g in subformulas(w.formula))
            sat = evaluate(m, w.formula)
            assert sat[x] and not sat[y]


def _agreement(models, decide, fragment, count=500, seed=10):
    rng = np.random.default_rng(seed)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        for m in models:
            part = decide(m)
            pairs = [(x, y) for x, y in part.pairs() if x < y]
            if not pairs:
                continue
            xs = np.array([p[0] for p in pairs])
            ys = np.array([p[1] for p in pairs])
            for _ in range(count):
                sat = evaluate(m, random_formula(rng, m.props, depth=4, fragment=fragment))
                assert np.array_equal(sat[xs], sat[ys])


AGREEMENT_MODELS = [load_fixture(n) for n in FIGURES] + random_corpus(10, 4, max_points=12)


@criterion(10)
@pytest.mark.parametrize("decide,fragment", [(E.cmc_bisimilarity, "imlc"),
                                             (E.path_bisimilarity, "irl"),
                                             (E.copa_bisimilarity, "icrl")])
def test_equivalent_points_agree_on_formulas(decide, fragment):
    _agreement(AGREEMENT_MODELS, decide, fragment)


# ---------------------------------------------------------------- 11 quotients

@criterion(11)
@pytest.mark.parametrize("kind", ["cmc", "path", "copa"])
def test_quotient_soundness(kind):
    models = [load_fixture(n) for n in FIGURES] + random_corpus(11, 100, max_points=12)
    for m in models:
        check = verify_quotient(m, minimize(m, kind))
        assert check, check.counterexample


# ---------------------------------------------------------------- 12 maze

@criterion(12)
def test_maze_quotient_structure():
    maze = load_fixture("maze")
    white = maze.prop_set("white")
    ap = minimize(maze, "ap")
    assert minimize(maze, "path").class_count == ap.class_count

    r = minimize(maze, "copa")
    q, proj = r.quotient, r.projection
    name_of = {(int(s[1:s.index("c")]), int(s[s.index("c") + 1:])): i for i, s in enumerate(maze.names)}
    start_cls = {int(proj[name_of[p]]) for p in STARTS}
    exit_cls = {int(proj[name_of[p]]) for p in EXITS}
    white_cls = sorted({int(proj[x]) for x in np.flatnonzero(white)})
    assert len(white_cls) >= 3

    nbrs = {c: set(q.successors(c).tolist()) | set(q.predecessors(c).tolist()) for c in white_cls}
    both = [c for c in white_cls if nbrs[c] & start_cls and nbrs[c] & exit_cls]
    exit_only = [c for c in white_cls if nbrs[c] & exit_cls and not nbrs[c] & start_cls]
    start_only = [c for c in white_cls if nbrs[c] & start_cls and not nbrs[c] & exit_cls]
    assert len(both) == 1
    assert exit_only and start_only


# ---------------------------------------------------------------- 13 timing

@criterion(13)
def test_performance_256():
    base = load_fixture("maze")
    minimize(base, "cmc")                   # compile the kernels before timing
    minimize(base, "copa")
    from closurebisim.maze import generate_maze
    grid = image_to_model(write_netpbm(upscale(generate_maze(), 8)), palette_from_dict(PALETTE))
    m = grid.base
    assert m.n == 65536

    t = time.perf_counter()
    cmc = minimize(m, "cmc")
    t_cmc = time.perf_counter() - t
    t = time.perf_counter()
    copa = minimize(m, "copa")
    t_copa = time.perf_counter() - t
    print(f"\n256x256: cmc {t_cmc:.2f}s ({cmc.class_count} classes), "
          f"copa {t_copa:.2f}s ({copa.class_count} classes)")
    assert t_cmc < 10.0
    assert t_copa < 60.0
