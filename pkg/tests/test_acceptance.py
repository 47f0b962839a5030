"""Acceptance suite: one test per criterion, each printing a pass/fail line.

All arithmetic is exact over finite fields, so every comparison below is an
identity check with zero tolerance; the only numeric budgets are wall-clock
ceilings per criterion.
"""

import random
import time

import pytest

from steinweil.cli import (
    RunConfig,
    build_contexts,
    render_json,
    render_text,
    run_suite,
    _run_char_conjugation,
    _run_char_distinctness,
    _run_char_homomorphism,
    _run_char_root_values,
    _run_x_irreducibility,
    _run_x_nonisomorphism,
)
from steinweil.ffield import FieldDescriptor
from steinweil.spgroup import (
    SubgroupId,
    SymplecticSpace,
    adjacent_swap,
    enumerate_subgroup,
    parabolic_orders,
)
from steinweil.steinberg import (
    check_conjugation_relations,
    check_eigenvector_stabilizer,
    check_embedding_isomorphisms,
    check_index_valuation,
    check_last_flip,
    check_rank_one_relation,
    check_reflection_on_eigenvector,
    check_reflection_recursion,
    check_second_flip,
    check_weil_above_socle,
    vector_from_cache_text,
    vector_to_cache_text,
)
from steinweil.weilmod import (
    all_n_tuples,
    check_flip_closed_forms,
    check_heisenberg_homomorphism,
    check_intertwining,
    check_twist_classes,
    check_weil_single_valued,
    check_y_quotient_structure,
)

FOUNDATION_SETS = [(1, 3), (1, 5), (1, 7), (2, 3)]


def _context(n, q, **kw):
    return build_contexts(RunConfig(n=n, q=q, **kw))[0]


@pytest.fixture(scope="module")
def contexts():
    return {(n, q): _context(n, q) for (n, q) in FOUNDATION_SETS}


@pytest.fixture(scope="module")
def steins(contexts):
    return {(n, q): ctx.steinberg() for (n, q), ctx in contexts.items()}


def _report(name, elapsed, budget):
    print(f"\n[acceptance] {name}: PASS ({elapsed:.1f}s < {budget}s)")


def test_criterion_1_foundation_exactness(contexts):
    budget, start = 5.0, time.perf_counter()
    for (n, q), ctx in contexts.items():
        space = ctx.space
        weyl = space.weyl
        sylow = ctx.subgroup(SubgroupId.sylow())
        assert len(sylow) == q ** (n * n)
        for g in sylow[:50]:
            assert space.is_symplectic_matrix(g.entries)
        for w in weyl.elements:
            minus = ctx.subgroup(SubgroupId.u_minus(w))
            assert len(minus) == q ** weyl.length(w)
            for g in minus:
                assert space.is_symplectic_matrix(g.entries)
        assert weyl.length(weyl.longest) == n * n
    elapsed = time.perf_counter() - start
    assert elapsed < budget
    _report("criterion-1 foundation-exactness", elapsed, budget)


def test_criterion_2_character_module_suite(contexts):
    budget, start = 60.0, time.perf_counter()
    for (n, q) in [(1, 3), (2, 3)]:
        ctx = contexts[(n, q)]
        assert _run_char_homomorphism(ctx, ctx.psi)["ok"]
        assert _run_char_distinctness(ctx, ctx.psi)["ok"]
        assert _run_char_root_values(ctx, ctx.psi)["ok"]
        assert _run_char_conjugation(ctx, ctx.psi)["ok"]
        assert _run_x_irreducibility(ctx, ctx.psi)["ok"]
        assert _run_x_nonisomorphism(ctx, ctx.psi)["ok"]
    for (n, q) in [(2, 3), (1, 7)]:
        ctx = contexts[(n, q)]
        from steinweil.ffield import is_square, least_nonsquare
        nonsq = least_nonsquare(ctx.q_field)
        res = check_twist_classes(ctx.space, ctx.psi, nonsq)
        assert res["ok"] and not res["x_isomorphic"]
        square = next((a for a in ctx.q_field.nonzero_codes()
                       if a != 1 and is_square(ctx.q_field, a)), 1)
        res = check_twist_classes(ctx.space, ctx.psi, square)
        assert res["ok"] and res["x_isomorphic"]
    elapsed = time.perf_counter() - start
    assert elapsed < budget
    _report("criterion-2 monomial-module-suite", elapsed, budget)


def test_criterion_3_weil_suite(contexts):
    budget, start = 120.0, time.perf_counter()
    for (n, q) in [(1, 3), (1, 5), (2, 3)]:
        ctx = contexts[(n, q)]
        res = check_heisenberg_homomorphism(ctx.space, ctx.psi)
        assert res["ok"] and res["pairs"] == q ** (2 * (2 * n + 1))
        assert check_intertwining(ctx.space, ctx.psi)["ok"]
        from steinweil.ffield import gauss_sum
        assert gauss_sum(ctx.psi) == 1  # coefficient characteristic 2
        flips = check_flip_closed_forms(ctx.space, ctx.psi)
        assert flips["flip_last"]
        assert flips["flip_second"] is None if n == 1 else flips["flip_second"]
        assert check_weil_single_valued(
            ctx.space, ctx.psi, ctx.rng("acc-weil"))["ok"]
        res = check_y_quotient_structure(ctx.space, ctx.psi,
                                         ctx.rng("acc-quot"))
        assert res["ok"] and res["fixed_dim"] == 1
        from steinweil.ffield import least_nonsquare
        res = check_twist_classes(ctx.space, ctx.psi,
                                  least_nonsquare(ctx.q_field))
        assert res["ok"] and not res["y_isomorphic"]
    elapsed = time.perf_counter() - start
    assert elapsed < budget
    _report("criterion-3 weil-suite", elapsed, budget)


def test_criterion_4_restricted_steinberg_suite(contexts, steins):
    budget, start = 600.0, time.perf_counter()
    stein = steins[(2, 3)]
    ctx = contexts[(2, 3)]
    q = 3
    for a in (1, 2):
        assert check_rank_one_relation(stein, "swap", 1, a)["ok"]
        assert check_rank_one_relation(stein, "flip", 2, a)["ok"]
    from steinweil.characters import in_stabilizer
    wcls = ctx.space.weyl.class_of(adjacent_swap(ctx.space, 1))
    uplus = stein.u_plus(wcls)
    recursion_instances = 0
    for v in all_n_tuples(ctx.space):
        if all(in_stabilizer(ctx.space, v, u) for u in uplus):
            assert check_reflection_recursion(stein, 1, v)["ok"]
            recursion_instances += 1
    assert recursion_instances == q * q  # every v here has stable positive part
    for alpha in range(q):
        assert check_reflection_on_eigenvector(stein, alpha)["ok"]
    res = check_eigenvector_stabilizer(stein)
    assert res["ok"] and res["elements"] == 1296
    for kappa in (1, 2):
        assert check_embedding_isomorphisms(stein, kappa)["ok"]
    elapsed = time.perf_counter() - start
    assert elapsed < budget
    _report("criterion-4 steinberg-restriction-suite", elapsed, budget)


def test_criterion_5_main_suite(contexts, steins):
    budget, start = 600.0, time.perf_counter()
    for (n, q) in FOUNDATION_SETS:
        res = check_last_flip(steins[(n, q)])
        assert res["ok"], (n, q, res)
    res = check_second_flip(steins[(2, 3)])
    assert res["ok"] and res["expansion_ok"] and res["summed_ok"] \
        and res["table_ok"]
    assert check_conjugation_relations(contexts[(2, 3)].space)["ok"]
    sp25 = SymplecticSpace(2, FieldDescriptor(5))
    assert check_conjugation_relations(sp25)["ok"]
    for (n, q) in [(1, 3), (2, 3)]:
        res = check_weil_above_socle(steins[(n, q)], (1, 2))
        assert res["ok"], (n, q, res)
        assert res["socle_fixed"]
        for t in res["twists"].values():
            assert t["stable"] and t["words_consistent"]
            assert t["intertwiner_dim"] == 1 and t["intertwiner_invertible"]
            assert t["trivial_control_dim"] == 0
        assert res["cross_intertwiner_dim"] == 0
        assert res["joint_rank"] == 2 * (q ** n - 1) // 2 + 1
    elapsed = time.perf_counter() - start
    assert elapsed < budget
    _report("criterion-5 main-theorem-suite", elapsed, budget)


def test_criterion_6_index_two_valuations():
    budget, start = 60.0, time.perf_counter()
    for (n, q) in [(1, 5), (2, 5), (1, 13)]:
        res = check_index_valuation(n, q)
        assert res["ok"] and res["valuation"] == res["kappa"] - 1
    for (n, q) in [(1, 5), (2, 3), (2, 5)]:
        space = SymplecticSpace(n, FieldDescriptor(q))
        nb, npj = parabolic_orders(space)
        assert npj == (q + 1) * nb
    elapsed = time.perf_counter() - start
    assert elapsed < budget
    _report("criterion-6 index-valuations", elapsed, budget)


def test_criterion_7_determinism(steins, tmp_path):
    budget, start = 300.0, time.perf_counter()
    for (n, q) in [(1, 3), (2, 3)]:
        stein = steins[(n, q)]
        rng = random.Random(q * 100 + n)
        torus = enumerate_subgroup(stein.space, SubgroupId.torus())
        translates = {w: rng.choice(torus) for w in stein.weyl.elements}
        assert stein.build_generator(translates) == stein.generator
    stein = steins[(1, 3)]
    text = vector_to_cache_text(stein, "generator", stein.generator)
    assert vector_from_cache_text(stein, "generator", text) == stein.generator
    cfg = RunConfig(tier="core", seed=3)
    assert render_json(run_suite(cfg)) == render_json(run_suite(cfg))
    assert render_text(run_suite(cfg)) == render_text(run_suite(cfg))
    elapsed = time.perf_counter() - start
    assert elapsed < budget
    _report("criterion-7 determinism", elapsed, budget)
