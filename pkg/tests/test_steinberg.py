import random

import numpy as np
import pytest

from steinweil.characters import PairingCharacter, UnipotentCharacter
from steinweil.ffield import AdditiveCharacter, FieldDescriptor
from steinweil.spgroup import (
    SubgroupId,
    SymplecticSpace,
    enumerate_subgroup,
    sign_flip,
)
from steinweil.steinberg import (
    GAVector,
    SteinbergModule,
    build_weil_embedding,
    check_conjugation_relations,
    check_eigenvector_stabilizer,
    check_embedding_isomorphisms,
    check_ideal_involution,
    check_index_valuation,
    check_last_flip,
    check_rank_one_relation,
    check_reflection_on_eigenvector,
    check_reflection_recursion,
    check_second_flip,
    check_torus_permutes_blocks,
    check_weil_above_socle,
    check_weyl_coset_eigenvectors,
    sum_scaled_translates,
    unipotent_coefficient_expected,
    vector_from_cache_text,
    vector_to_cache_text,
)


def test_gavector_arithmetic(stein13, f4):
    ga = stein13.ga
    sp = stein13.space
    g = stein13.sylow[1]
    v = GAVector.from_element(ga, g, 2)
    assert v.scale(0).is_zero()
    assert v.add(v.neg()).is_zero()
    w = v.translate(g.inverse())
    assert w == GAVector.from_element(ga, sp.identity, 2)
    e = stein13.generator
    assert e.translate(g).support_size == e.support_size
    assert e.translate(g).translate(g.inverse()) == e


def test_generator_structure(stein13):
    e = stein13.generator
    assert e.support_size == 12  # |W| * |B| with disjoint cells
    # the flip negates, the torus fixes (checked at build; re-check visibly)
    cn = sign_flip(stein13.space, 1)
    assert e.translate(cn) == e.scale(stein13.field.minus_one)


def test_generator_lift_independence(stein13, stein23):
    for stein in (stein13, stein23):
        rng = random.Random(23)
        torus = enumerate_subgroup(stein.space, SubgroupId.torus())
        translates = {w: rng.choice(torus) for w in stein.weyl.elements}
        assert stein.build_generator(translates) == stein.generator


def test_eigenvector_properties(stein13, f4):
    echi = stein13.pairing_eigenvector(1)
    sigma = UnipotentCharacter.from_pairing(
        PairingCharacter.from_n_coords(stein13.space, stein13.psi, (1,)))
    for u in stein13.sylow:
        assert echi.translate(u) == echi.scale(sigma.value(u))
    assert not echi.is_zero()
    bad = UnipotentCharacter(stein13.space, stein13.psi, (0,))
    # the trivial sigma gives the socle generator, fixed by all of U
    e1 = stein13.eigenvector(bad)
    for u in stein13.sylow:
        assert e1.translate(u) == e1


def test_coords_examples(stein13):
    e = stein13.generator
    u0 = stein13.sylow[2]
    ind = stein13.coords(e.translate(u0))
    expected = np.zeros(3, dtype=np.int64)
    expected[stein13.sylow_index[u0.key]] = 1
    assert np.array_equal(ind, expected)
    assert np.all(stein13.coords(stein13.socle_generator()) == 1)
    echi = stein13.pairing_eigenvector(1)
    chi = PairingCharacter.from_n_coords(stein13.space, stein13.psi, (1,))
    expect = [stein13.field.inv(chi.value(u)) for u in stein13.sylow]
    assert stein13.coords(echi).tolist() == expect


def test_torus_conjugates_eigenvectors(stein23):
    # h e_sigma = e_{sigma conjugated by h}, for every torus element
    torus = enumerate_subgroup(stein23.space, SubgroupId.torus())
    for coeffs in ((0, 1), (1, 2)):
        sigma = UnipotentCharacter(stein23.space, stein23.psi, coeffs)
        vec = stein23.eigenvector(sigma)
        for h in torus:
            assert vec.translate(h) == \
                stein23.eigenvector(sigma.conjugated_by_torus(h))


def test_torus_through_rotation_on_eigenvectors(stein23, f3):
    # h (rotation(i) e_{chi_a}) = rotation(i) e_{chi_{a h_i}}, where h_i is
    # the v_i-eigenvalue of h
    from steinweil.spgroup import rotation
    space = stein23.space
    for tcodes in ((2, 1), (1, 2)):
        from steinweil.spgroup import torus_element
        h = torus_element(space, tcodes)
        for i in (1, 2):
            rot = rotation(space, i)
            h_i = f3.inv(tcodes[i - 1])  # v_i-eigenvalue
            for a in f3.nonzero_codes():
                lhs = stein23.pairing_eigenvector(a).translate(rot).translate(h)
                rhs = stein23.pairing_eigenvector(
                    f3.mul(a, h_i)).translate(rot)
                assert lhs == rhs


def test_coords_rejects_outsiders(stein13):
    ga = stein13.ga
    stray = GAVector.from_element(ga, stein13.space.identity)
    with pytest.raises(ValueError):
        stein13.coords(stray)


def test_coords_roundtrip_random(stein23):
    rng = random.Random(1)
    f = stein23.field
    for _ in range(10):
        coords = np.array([rng.randrange(f.size) for _ in stein23.sylow],
                          dtype=np.int64)
        vec = stein23.reconstruct(coords)
        assert np.array_equal(stein23.coords(vec), coords)


def test_regular_module(stein13):
    e = stein13.generator
    for u0 in stein13.sylow:
        for u in stein13.sylow:
            assert e.translate(u).translate(u0) == e.translate(u0 * u)


def test_rank_one_relation_cases(stein13, stein23):
    for a in (1, 2):
        assert check_rank_one_relation(stein13, "flip", 1, a)["ok"]
        assert check_rank_one_relation(stein23, "flip", 2, a)["ok"]
        assert check_rank_one_relation(stein23, "swap", 1, a)["ok"]
    with pytest.raises(ValueError):
        check_rank_one_relation(stein13, "flip", 1, 0)


def test_reflection_identities(stein23):
    res = check_reflection_on_eigenvector(stein23, 1)
    assert res["ok"]
    # at n = 2 the positive part of the swap fixes all of N modulo M,
    # so every vector is admissible
    for v in ((0, 1), (1, 0), (1, 2)):
        assert check_reflection_recursion(stein23, 1, v)["ok"]


def test_flip_identities_13(stein13, f4):
    res = check_last_flip(stein13)
    assert res["ok"] and res["expansion_ok"] and res["closed_form_ok"]
    # the closed form at q=3 collapses to socle + eigenvector
    e1 = stein13.socle_generator()
    echi = stein13.pairing_eigenvector(1)
    cn = sign_flip(stein13.space, 1)
    assert echi.translate(cn) == e1.add(echi)


def test_flip_identities_15():
    f5, f16 = FieldDescriptor(5), FieldDescriptor(2, 4)
    sp = SymplecticSpace(1, f5)
    psi = AdditiveCharacter(f5, f16)
    stein = SteinbergModule(sp, f16, psi)
    assert check_last_flip(stein)["ok"]


def test_coefficient_table_cases(stein23, f4):
    psi = stein23.psi
    fq = stein23.space.field
    assert unipotent_coefficient_expected(stein23, 0, 0, 1, 0) == 0
    assert unipotent_coefficient_expected(stein23, 1, 0, 0, 2) == \
        psi.value(fq.neg(2))
    got = unipotent_coefficient_expected(stein23, 0, 2, 1, 1)
    want = psi.value(fq.sub(fq.mul(fq.mul(1, 1), fq.inv(2)), 1))
    assert got == want


def test_conjugation_relations(stein23):
    res = check_conjugation_relations(stein23.space)
    assert res["ok"]
    sp25 = SymplecticSpace(2, FieldDescriptor(5))
    assert check_conjugation_relations(sp25)["ok"]


def test_embedding_13(stein13):
    emb = build_weil_embedding(stein13, 1)
    assert emb.dim == 1
    assert check_torus_permutes_blocks(stein13, emb)["ok"]
    assert check_embedding_isomorphisms(stein13, 1, emb)["ok"]


def test_weyl_cosets_23(stein23):
    assert check_weyl_coset_eigenvectors(stein23)["ok"]


def test_main_theorem_13(stein13):
    res = check_weil_above_socle(stein13)
    assert res["ok"]
    assert res["joint_rank"] == 3  # two lines plus the socle fill the ideal
    for t in res["twists"].values():
        assert t["intertwiner_dim"] == 1 and t["intertwiner_invertible"]
    assert res["cross_intertwiner_dim"] == 0


def test_ideal_involution(stein13):
    assert check_ideal_involution(stein13)["ok"]


def test_index_valuation_values():
    r = check_index_valuation(1, 5)
    assert r["ok"] and (r["borel_index"], r["kappa"]) == (6, 1)
    r = check_index_valuation(2, 5)
    assert r["ok"] and (r["borel_index"], r["kappa"]) == (936, 3)
    assert r["parabolic_index"] == 156 and r["valuation"] == 2
    r = check_index_valuation(1, 13)
    assert r["ok"] and r["borel_index"] == 14
    with pytest.raises(ValueError):
        check_index_valuation(1, 3)


def test_odd_coefficient_characteristic_path():
    # the secondary regime: l = 3 divides q + 1 = 6 at q = 5, n = 1
    f5 = FieldDescriptor(5)
    f81 = FieldDescriptor(3, 4)  # 5 divides 81 - 1
    sp = SymplecticSpace(1, f5)
    psi = AdditiveCharacter(f5, f81)
    stein = SteinbergModule(sp, f81, psi)
    e = stein.generator  # build asserts he = e and the sign relation
    assert e.support_size == 2 * 20
    for a in f5.nonzero_codes():
        assert check_rank_one_relation(stein, "flip", 1, a)["ok"]
    res = check_eigenvector_stabilizer(stein)
    assert res["ok"]


def test_cache_roundtrip(stein13, tmp_path):
    e = stein13.generator
    text = vector_to_cache_text(stein13, "generator", e)
    assert text.splitlines()[0] == \
        "steinweil-cache v1 n=1 q=3 l=2 m=2 modulus=1,1,1 object=generator"
    back = vector_from_cache_text(stein13, "generator", text)
    assert back == e
    assert vector_to_cache_text(stein13, "generator", back) == text
    with pytest.raises(ValueError):
        vector_from_cache_text(stein13, "socle", text)  # header mismatch
    with pytest.raises(ValueError):
        vector_from_cache_text(stein13, "generator",
                               text.rsplit("\n", 3)[0] + "\n1 1,1,1\n")


def test_cache_dir_integration(tmp_path):
    f3, f4 = FieldDescriptor(3), FieldDescriptor(2, 2)
    sp = SymplecticSpace(1, f3)
    psi = AdditiveCharacter(f3, f4)
    first = SteinbergModule(sp, f4, psi, cache_dir=str(tmp_path))
    e = first.generator
    echi = first.pairing_eigenvector(1)
    assert (tmp_path / "generator.cache").exists()
    second = SteinbergModule(sp, f4, psi, cache_dir=str(tmp_path))
    assert second.generator == e
    assert second.pairing_eigenvector(1) == echi
    # corrupt file: recompute with a warning
    (tmp_path / "generator.cache").write_text("garbage\n")
    with pytest.warns(UserWarning):
        third = SteinbergModule(sp, f4, psi, cache_dir=str(tmp_path))
        assert third.generator == e
    # stale header (different parameters) is ignored too
    other = SteinbergModule(SymplecticSpace(1, FieldDescriptor(5)),
                            FieldDescriptor(2, 4),
                            AdditiveCharacter(FieldDescriptor(5),
                                              FieldDescriptor(2, 4)),
                            cache_dir=str(tmp_path))
    with pytest.warns(UserWarning):
        assert other.generator.support_size == 2 * 20


def test_chunked_merge_agrees(stein13):
    e = stein13.generator
    f = stein13.field
    terms = [(u, 1 + (i % (f.size - 1))) for i, u in enumerate(stein13.sylow)]
    big = sum_scaled_translates(e, terms, chunk_terms=10 ** 9)
    small = sum_scaled_translates(e, terms, chunk_terms=8)
    assert big == small


def test_second_flip_vacuous_at_n1(stein13):
    res = check_second_flip(stein13)
    assert res["ok"] is None
