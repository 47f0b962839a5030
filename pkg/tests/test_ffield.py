import numpy as np
import pytest

from steinweil.ffield import (
    AdditiveCharacter,
    FieldDescriptor,
    gauss_sum,
    is_square,
    least_nonsquare,
    transversal,
)


def test_default_moduli_table():
    assert FieldDescriptor(2, 2).modulus == (1, 1, 1)
    assert FieldDescriptor(2, 3).modulus == (1, 1, 0, 1)
    assert FieldDescriptor(2, 4).modulus == (1, 1, 0, 0, 1)
    assert FieldDescriptor(3, 2).modulus == (1, 0, 1)


def test_construction_errors():
    with pytest.raises(ValueError):
        FieldDescriptor(4)  # not prime
    with pytest.raises(ValueError):
        FieldDescriptor(2, 0)
    with pytest.raises(ValueError):
        FieldDescriptor(2, 2, (1, 0, 1))  # x^2+1 = (x+1)^2 over GF(2)


def test_gf4_arithmetic():
    f = FieldDescriptor(2, 2)
    z = f.generator
    z2 = f.mul(z, z)
    assert f.mul(z, z2) == 1          # z has order 3
    assert f.add(z, z2) == 1          # 1 + z + z^2 = 0
    assert f.inv(z) == z2


def test_gf3_inverse():
    f = FieldDescriptor(3)
    assert f.inv(2) == 2
    with pytest.raises(ZeroDivisionError):
        f.inv(0)


@pytest.mark.parametrize("p,m", [(2, 2), (2, 3), (3, 1), (3, 2), (5, 1),
                                 (5, 2), (7, 1), (7, 2)])
def test_field_axioms_exhaustive(p, m):
    f = FieldDescriptor(p, m)
    codes = range(f.size)
    for a in codes:
        assert f.add(a, 0) == a
        assert f.mul(a, 1) == a
        assert f.add(a, f.neg(a)) == 0
        if a:
            assert f.mul(a, f.inv(a)) == 1
    for a in codes:
        for b in codes:
            assert f.add(a, b) == f.add(b, a)
            assert f.mul(a, b) == f.mul(b, a)
            # Frobenius is additive and multiplicative
            assert f.frobenius(f.add(a, b)) == f.add(f.frobenius(a),
                                                     f.frobenius(b))
            assert f.frobenius(f.mul(a, b)) == f.mul(f.frobenius(a),
                                                     f.frobenius(b))
    if f.size <= 16:
        for a in codes:
            for b in codes:
                for c in codes:
                    assert f.mul(a, f.add(b, c)) == \
                        f.add(f.mul(a, b), f.mul(a, c))


def test_vector_ops_match_scalar():
    for p, m in [(3, 1), (2, 2), (3, 2)]:
        f = FieldDescriptor(p, m)
        a = np.arange(f.size, dtype=np.int64)
        b = np.roll(a, 1)
        assert all(int(x) == f.add(int(u), int(v))
                   for x, u, v in zip(f.vadd(a, b), a, b))
        assert all(int(x) == f.mul(int(u), int(v))
                   for x, u, v in zip(f.vmul(a, b), a, b))
        assert all(int(x) == f.neg(int(u)) for x, u in zip(f.vneg(a), a))


def test_vsum_groups():
    f = FieldDescriptor(2, 2)
    vals = np.array([2, 2, 3, 1, 1, 1], dtype=np.int64)
    starts = np.array([0, 2, 3], dtype=np.int64)
    out = f.vsum_groups(vals, starts)
    assert out.tolist() == [0, 3, f.add(1, f.add(1, 1))]


def test_trace_to_prime():
    f3 = FieldDescriptor(3)
    assert f3.trace_to_prime(2) == 2  # identity on the prime field
    f9 = FieldDescriptor(3, 2)  # modulus x^2 + 1
    # oracle: for a root g of x^2+1, g + g^3 = g(1 + g^2) = g * 0 = 0
    root = f9.from_coefficients((0, 1)).code
    assert f9.trace_to_prime(root) == 0
    f4 = FieldDescriptor(2, 2)
    assert f4.trace_to_prime(f4.generator) == 1  # z + z^2 = 1


def test_character_values_small():
    f3, f4 = FieldDescriptor(3), FieldDescriptor(2, 2)
    chi = AdditiveCharacter(f3, f4)
    z = chi.zeta
    assert chi.value(0) == 1
    assert chi.value(1) == z
    assert chi.value(2) == f4.mul(z, z)
    assert f4.mul(chi.value(1), chi.value(2)) == 1


@pytest.mark.parametrize("q,l,m", [(3, 2, 2), (5, 2, 4), (7, 2, 3), (9, 2, 2),
                                   (5, 3, 4), (49, 2, 3)])
def test_character_homomorphism_exhaustive(q, l, m):
    p, mq = {9: (3, 2), 49: (7, 2)}.get(q, (q, 1))
    fq = FieldDescriptor(p, mq)
    f = FieldDescriptor(l, m)
    chi = AdditiveCharacter(fq, f)
    for a in range(fq.size):
        for b in range(fq.size):
            assert chi.value(fq.add(a, b)) == f.mul(chi.value(a), chi.value(b))
    assert any(chi.value(a) != 1 for a in range(fq.size))
    # sum over the field vanishes for a nontrivial character
    total = 0
    for a in range(fq.size):
        total = f.add(total, chi.value(a))
    assert total == 0


def test_character_twist_composition():
    fq = FieldDescriptor(5)
    f = FieldDescriptor(2, 4)
    chi = AdditiveCharacter(fq, f)
    for k1 in fq.nonzero_codes():
        for k2 in fq.nonzero_codes():
            lhs = chi.twisted(k1).twisted(k2)
            rhs = chi.twisted(fq.mul(k1, k2))
            assert all(lhs.value(a) == rhs.value(a) for a in range(fq.size))


def test_character_validation():
    f3, f4 = FieldDescriptor(3), FieldDescriptor(2, 2)
    with pytest.raises(ValueError):
        AdditiveCharacter(f3, FieldDescriptor(3, 2))  # same characteristic
    with pytest.raises(ValueError):
        AdditiveCharacter(f3, FieldDescriptor(2, 1))  # no cube root of unity
    with pytest.raises(ValueError):
        AdditiveCharacter(f3, f4, twist=0)


def test_gauss_sum_char2_is_one():
    for q, m in [(3, 2), (5, 4), (7, 3)]:
        fq = FieldDescriptor(q)
        chi = AdditiveCharacter(fq, FieldDescriptor(2, m))
        assert gauss_sum(chi) == 1


def test_gauss_sum_term_by_term():
    # q = 3 over GF(4): squares are 0,1,1 so the sum is 1 + 2*psi(1) = 1
    f3, f4 = FieldDescriptor(3), FieldDescriptor(2, 2)
    chi = AdditiveCharacter(f3, f4)
    acc = chi.value(0)
    acc = f4.add(acc, chi.value(1))
    acc = f4.add(acc, chi.value(1))
    assert acc == 1 == gauss_sum(chi)


def test_gauss_sum_rejects_even_q():
    f4 = FieldDescriptor(2, 2)
    chi = AdditiveCharacter(FieldDescriptor(3), f4)
    with pytest.raises(ValueError):
        gauss_sum(AdditiveCharacter(FieldDescriptor(2, 2), FieldDescriptor(3)))


def test_is_square():
    f3 = FieldDescriptor(3)
    assert is_square(f3, 1)
    assert not is_square(f3, 2)
    f7 = FieldDescriptor(7)
    squares = {f7.mul(a, a) for a in f7.nonzero_codes()}  # exhaustive oracle
    assert squares == {1, 2, 4}
    for a in f7.nonzero_codes():
        assert is_square(f7, a) == (a in squares)
    with pytest.raises(ValueError):
        is_square(f3, 0)
    with pytest.raises(ValueError):
        is_square(FieldDescriptor(2, 2), 1)


def test_square_multiplicativity():
    for q in (3, 5, 7, 9):
        p, m = (3, 2) if q == 9 else (q, 1)
        f = FieldDescriptor(p, m)
        for a in f.nonzero_codes():
            for b in f.nonzero_codes():
                assert is_square(f, f.mul(a, b)) == \
                    (is_square(f, a) == is_square(f, b))


def test_transversal():
    assert transversal(FieldDescriptor(3)) == [1]
    assert transversal(FieldDescriptor(5)) == [1, 2]
    assert transversal(FieldDescriptor(7)) == [1, 2, 3]
    assert transversal(FieldDescriptor(2, 2)) == [1, 2, 3]
    for q in (3, 5, 7):
        f = FieldDescriptor(q)
        t = transversal(f)
        assert len(t) == (q - 1) // 2
        assert len(set(t)) == len(t)
        assert sorted(t + [f.neg(a) for a in t]) == list(f.nonzero_codes())


def test_least_nonsquare():
    assert least_nonsquare(FieldDescriptor(3)) == 2
    assert least_nonsquare(FieldDescriptor(7)) == 3
