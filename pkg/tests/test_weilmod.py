import random

import numpy as np
import pytest

from steinweil.ffield import AdditiveCharacter, FieldDescriptor
from steinweil.repcore import (
    commutant_dimension,
    f_matmul,
    intertwiner_space,
    irreducible_exhaustive,
)
from steinweil.spgroup import (
    SubgroupId,
    SymplecticSpace,
    adjacent_swap,
    borel_generators,
    enumerate_subgroup,
    m_stabilizer_generators,
    sylow_generators,
)
from steinweil.weilmod import (
    HeisenbergElement,
    all_n_tuples,
    check_flip_closed_forms,
    check_heisenberg_homomorphism,
    check_intertwining,
    check_twist_classes,
    check_weil_single_valued,
    check_x_quotient_map,
    check_y_quotient_structure,
    enumerate_heisenberg,
    heisenberg_identity,
    heisenberg_inverse,
    heisenberg_map,
    heisenberg_mul,
    induced_rep_full,
    induced_rep_layer,
    induced_rep_piece,
    induced_rep_signed,
    nkey,
    weil_rep_signed,
    x_action,
    x_monomial,
)


def test_x_action_basics(sp23, psi23):
    ident = sp23.identity
    for v in all_n_tuples(sp23):
        c, w = x_action(sp23, psi23, ident, v)
        assert c == 1 and w == v
    # Weyl permutation part acts by permuting indices with scalar 1
    swap = adjacent_swap(sp23, 1)
    c, w = x_action(sp23, psi23, swap, (1, 2))
    assert c == 1 and w == (2, 1)
    # pointwise-M part scales without moving the index
    from steinweil.spgroup import root_element
    s = root_element(sp23, 2, 4, 1)
    c, w = x_action(sp23, psi23, s, (0, 1))
    assert w == (0, 1) and c == psi23.value(1)


def test_x_dimensions(sp23, psi23):
    u_gens = sylow_generators(sp23)
    m_gens = m_stabilizer_generators(sp23)
    assert induced_rep_piece(sp23, psi23, u_gens, 1, 1).dim == 3
    assert induced_rep_piece(sp23, psi23, u_gens, 1, 2).dim == 1
    assert induced_rep_signed(sp23, psi23, m_gens).dim == 4
    assert induced_rep_full(sp23, psi23, m_gens).dim == 9


def test_x_homomorphism_exhaustive_borel_13(sp13, psi13, f4):
    borel = enumerate_subgroup(sp13, SubgroupId.borel())
    for g in borel:
        for h in borel:
            lhs = x_monomial(sp13, psi13, g * h).to_matrix(f4)
            rhs = f_matmul(f4, x_monomial(sp13, psi13, g).to_matrix(f4),
                           x_monomial(sp13, psi13, h).to_matrix(f4))
            assert np.array_equal(lhs, rhs)


def test_x_irreducibility_certificates(sp23, psi23):
    u_gens = sylow_generators(sp23)
    b_gens = borel_generators(sp23)
    m_gens = m_stabilizer_generators(sp23)
    for parity in ("+", "-"):
        piece = induced_rep_piece(sp23, psi23, u_gens, 1, 1, parity)
        assert irreducible_exhaustive(piece)
        assert commutant_dimension(piece) == 1
        layer = induced_rep_layer(sp23, psi23, b_gens, 1, parity)
        assert layer.dim == 3
        assert irreducible_exhaustive(layer)
        assert commutant_dimension(layer) == 1
        signed = induced_rep_signed(sp23, psi23, m_gens, parity)
        assert irreducible_exhaustive(signed)
        assert commutant_dimension(signed) == 1


def test_x_piece_nonisomorphism(sp23, psi23):
    u_gens = sylow_generators(sp23)
    # alpha = 2 is -1, the same plus-minus class as alpha = 1: equal modules
    p1 = induced_rep_piece(sp23, psi23, u_gens, 1, 1)
    p2 = induced_rep_piece(sp23, psi23, u_gens, 2, 1)
    assert len(intertwiner_space(p1, p2)) == 1
    # distinct slices are not isomorphic
    deep = induced_rep_piece(sp23, psi23, u_gens, 1, 2)
    # pad: intertwiners need matching shapes only, labels already match
    assert len(intertwiner_space(deep, p1)) == 0
    # genuinely distinct classes exist at q = 5
    f5, f16 = FieldDescriptor(5), FieldDescriptor(2, 4)
    sp15 = SymplecticSpace(1, f5)
    psi15 = AdditiveCharacter(f5, f16)
    gens15 = sylow_generators(sp15)
    a1 = induced_rep_piece(sp15, psi15, gens15, 1, 1)
    a2 = induced_rep_piece(sp15, psi15, gens15, 2, 1)
    assert len(intertwiner_space(a1, a2)) == 0
    # the direct sum of two non-isomorphic slices has commutant dimension 2
    from steinweil.repcore import direct_sum
    assert commutant_dimension(direct_sum(a1, a2)) == 2
    # plus and minus parities of one slice are isomorphic
    m1 = induced_rep_piece(sp23, psi23, u_gens, 1, 1, "-")
    assert len(intertwiner_space(p1, m1)) > 0


def test_x_even_characteristic_pieces():
    # the module theory of the pieces also holds at p = 2 with l odd
    f2 = FieldDescriptor(2)
    f3 = FieldDescriptor(3)
    sp = SymplecticSpace(1, f2)
    psi = AdditiveCharacter(f2, f3)
    u_gens = sylow_generators(sp)
    signed = induced_rep_signed(sp, psi, m_stabilizer_generators(sp))
    assert signed.dim == 1  # q^n - 1
    assert irreducible_exhaustive(signed)


def test_heisenberg_group(sp23, f3):
    e = heisenberg_identity(sp23)
    h = HeisenbergElement(1, (0, 1, 2, 0))
    assert heisenberg_mul(sp23, e, h) == h
    u1v1 = heisenberg_mul(sp23, HeisenbergElement(0, sp23.u_vector(1)),
                          HeisenbergElement(0, sp23.v_vector(1)))
    assert u1v1 == HeisenbergElement(1, (1, 0, 1, 0))
    inv = heisenberg_inverse(sp23, h)
    assert heisenberg_mul(sp23, h, inv) == e
    assert len(enumerate_heisenberg(sp23)) == 3 ** 5


def test_heisenberg_action_formula(sp13, psi13):
    # (alpha, 0) acts by the scalar psi(alpha)
    for alpha in range(3):
        jm = heisenberg_map(sp13, psi13, HeisenbergElement(alpha, (0, 0)))
        assert np.all(jm.perm == np.arange(3))
        assert np.all(jm.scal == psi13.value(alpha))


def test_heisenberg_homomorphism_exhaustive(sp13, psi13):
    res = check_heisenberg_homomorphism(sp13, psi13)
    assert res["ok"] and res["pairs"] == 27 ** 2


def test_heisenberg_homomorphism_15():
    f5, f16 = FieldDescriptor(5), FieldDescriptor(2, 4)
    sp = SymplecticSpace(1, f5)
    psi = AdditiveCharacter(f5, f16)
    assert check_heisenberg_homomorphism(sp, psi)["ok"]


def test_weil_matrix_values(sp13, psi13, f4):
    from steinweil.weilmod import weil_matrix, weil_transvection
    assert np.array_equal(weil_matrix(sp13, psi13, sp13.identity),
                          np.eye(3, dtype=np.int64))
    # the transvection column at the zero index: eps_0 + sum of psi(a^2) eps_a
    m = weil_matrix(sp13, psi13, weil_transvection(sp13))
    col0 = m[:, 0]
    assert col0[0] == 1
    assert col0[nkey(sp13, (1,))] == psi13.value(1)
    assert col0[nkey(sp13, (2,))] == psi13.value(1)
    # p = 2 is rejected
    f2, f3 = FieldDescriptor(2), FieldDescriptor(3)
    sp2 = SymplecticSpace(1, f2)
    with pytest.raises(ValueError):
        weil_matrix(sp2, AdditiveCharacter(f2, f3), sp2.identity)


def test_weil_intertwining_exhaustive(sp13, psi13):
    assert check_intertwining(sp13, psi13)["ok"]


def test_weil_single_valued(sp13, psi13):
    res = check_weil_single_valued(sp13, psi13, random.Random(17))
    assert res["ok"] and res["pairs"] >= 100


def test_weil_signed_dims(sp13, sp23, psi13, psi23):
    assert weil_rep_signed(sp13, psi13).dim == 1
    assert weil_rep_signed(sp23, psi23).dim == 4
    # plus and minus coincide in coefficient characteristic 2
    plus = weil_rep_signed(sp23, psi23, "+")
    minus = weil_rep_signed(sp23, psi23, "-")
    for a, b in zip(plus.matrices, minus.matrices):
        assert np.array_equal(a, b)


def test_flip_closed_form_13(sp13, psi13, f4):
    # c_1 multiplies the signed v_1 vector by psi(1)+psi(2) = 1
    res = check_flip_closed_forms(sp13, psi13)
    assert res["flip_last"] is True and res["flip_second"] is None
    assert f4.add(psi13.value(1), psi13.value(2)) == 1


def test_flip_closed_forms_23_and_15(sp23, psi23):
    res = check_flip_closed_forms(sp23, psi23)
    assert res["flip_last"] and res["flip_second"]
    f5, f16 = FieldDescriptor(5), FieldDescriptor(2, 4)
    sp = SymplecticSpace(1, f5)
    res = check_flip_closed_forms(sp, AdditiveCharacter(f5, f16))
    assert res["flip_last"]


def test_twist_classes_23(sp23, psi23):
    nonsq = check_twist_classes(sp23, psi23, 2)
    assert nonsq["ok"] and not nonsq["square"]
    assert not nonsq["x_isomorphic"] and not nonsq["y_isomorphic"]
    sq = check_twist_classes(sp23, psi23, 1)
    assert sq["ok"] and sq["x_isomorphic"] and sq["y_isomorphic"]


def test_twist_classes_17():
    f7, f8 = FieldDescriptor(7), FieldDescriptor(2, 3)
    sp = SymplecticSpace(1, f7)
    psi = AdditiveCharacter(f7, f8)
    # 2 = 3^2 is a square mod 7; 3 is not
    sq = check_twist_classes(sp, psi, 2)
    assert sq["ok"] and sq["square"] and sq["y_isomorphic"]
    nonsq = check_twist_classes(sp, psi, 3)
    assert nonsq["ok"] and not nonsq["square"] and not nonsq["y_isomorphic"]


def test_quotient_structure(sp13, sp23, psi13, psi23):
    assert check_x_quotient_map(sp13, psi13)
    assert check_x_quotient_map(sp23, psi23)
    res = check_y_quotient_structure(sp23, psi23, random.Random(3))
    assert res["ok"] and res["fixed_dim"] == 1


def test_transversal_indexes_signed_basis(sp23, psi23, f3):
    # the signed labels hit exactly one of each {v, -v}
    from steinweil.weilmod import neg_tuple, signed_labels
    labels = signed_labels(sp23)
    assert len(labels) == 4
    seen = set(labels)
    for v in labels:
        assert neg_tuple(sp23, v) not in seen
