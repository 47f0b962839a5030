"""Scalar-valued functions on subgroups of Sp: the pairing characters
chi_v(g) = psi(<gv,v>), their signed extensions to the hat-stabilizer, the
quadratic determinant character on Sp_M, and linear characters of the Sylow
subgroup U used to form eigenvectors in the Steinberg module.
"""

from __future__ import annotations

from .ffield import AdditiveCharacter, FieldDescriptor, is_square
from .spgroup import (
    SympElement,
    SymplecticSpace,
    in_sp_m,
    in_sylow,
    split_sp_m,
)


class PairingCharacter:
    """chi_v: g |-> psi(<gv, v>), for a fixed vector v.

    The formula is total on Sp; it is multiplicative exactly on the
    stabilizer S_v = {g in Sp_M : gv = v mod M} (and on U when v lies in
    the span of v_n).
    """

    def __init__(self, space: SymplecticSpace, psi: AdditiveCharacter,
                 vector: tuple[int, ...]):
        if psi.source != space.field:
            raise ValueError("character source must be the base field")
        if len(vector) != space.dim:
            raise ValueError("expected a full coordinate vector")
        self.space = space
        self.psi = psi
        self.vector = tuple(vector)

    @classmethod
    def from_n_coords(cls, space: SymplecticSpace, psi: AdditiveCharacter,
                      ncoords) -> "PairingCharacter":
        return cls(space, psi, space.embed_n(ncoords))

    @property
    def n_coords(self) -> tuple[int, ...]:
        return self.space.n_part(self.vector)

    def value(self, g: SympElement) -> int:
        v = self.vector
        return self.psi.value(self.space.pairing(g.apply(v), v))

    def conjugated(self, g0: SympElement) -> "PairingCharacter":
        """The character with vector g0 v; satisfies chi_v(g^{g0}) = chi_{g0 v}(g)."""
        return PairingCharacter(self.space, self.psi, g0.apply(self.vector))

    def __repr__(self):
        return f"PairingCharacter(v={self.vector}, twist={self.psi.twist})"


class SignedPairingCharacter:
    """Extension of chi_v from S_v to its product with the center, sending
    the central -1 to the chosen sign."""

    def __init__(self, base: PairingCharacter, sign_at_minus_one: int = 1):
        if sign_at_minus_one not in (1, -1):
            raise ValueError("sign must be +1 or -1")
        self.base = base
        f = base.psi.target
        self.sign_code = 1 if sign_at_minus_one == 1 else f.minus_one

    def value(self, g: SympElement) -> int:
        space = self.base.space
        v = self.base.vector
        gv = space.n_part(g.apply(v))
        if gv == space.n_part(v):
            return self.base.value(g)
        if gv == space.n_part(space.neg_vec(v)):
            f = self.base.psi.target
            return f.mul(self.sign_code, self.base.value(-g))
        raise ValueError("element is outside the hat-stabilizer of v")


def in_stabilizer(space: SymplecticSpace, ncoords, g: SympElement,
                  hat: bool = False) -> bool:
    """Whether g in Sp_M satisfies gv = v mod M (or gv = +-v mod M)."""
    if not in_sp_m(g):
        raise ValueError("stabilizer membership requires an element of Sp_M")
    v = space.embed_n(ncoords)
    gv = space.n_part(g.apply(v))
    if gv == space.n_part(v):
        return True
    return hat and gv == space.n_part(space.neg_vec(v))


def determinant_character(space: SymplecticSpace, coeff_field: FieldDescriptor,
                          g: SympElement) -> int:
    """Legendre symbol of det of the N-block of the diagonal part of g,
    mapped into the coefficient field (so identically 1 when char F = 2)."""
    from .spgroup import mat_det
    if space.field.p == 2:
        raise ValueError("the quadratic character needs odd base characteristic")
    if not in_sp_m(g):
        raise ValueError("element does not stabilize M")
    _, a = split_sp_m(g)
    det = mat_det(space.field, a.n_block(), space.n)
    return 1 if is_square(space.field, det) else coeff_field.minus_one


def fundamental_components(space: SymplecticSpace, u: SympElement
                           ) -> tuple[int, ...]:
    """Coordinates of u on the n fundamental root subgroups.

    For u = t s these are the first superdiagonal of the torus-part block
    and the last diagonal entry of the symmetric block of s; extraction is a
    homomorphism onto F_q^n, the derived quotient of U.
    """
    if not in_sylow(u):
        raise ValueError("element is not in U")
    n = space.n
    s, a = split_sp_m(u)
    a_blk = a.m_block()
    comps = [a_blk[i * n + (i + 1)] for i in range(n - 1)]
    s_blk = s.top_right_block()
    comps.append(s_blk[(n - 1) * n + (n - 1)])
    return tuple(comps)


class UnipotentCharacter:
    """A linear character of U, given in closed form by one additive-character
    weight per fundamental root coordinate."""

    def __init__(self, space: SymplecticSpace, psi: AdditiveCharacter,
                 coefficients: tuple[int, ...]):
        if len(coefficients) != space.n:
            raise ValueError("expected one coefficient per fundamental root")
        self.space = space
        self.psi = psi
        self.coefficients = tuple(coefficients)

    @classmethod
    def trivial(cls, space: SymplecticSpace, psi: AdditiveCharacter):
        return cls(space, psi, (0,) * space.n)

    @classmethod
    def from_pairing(cls, chi: PairingCharacter) -> "UnipotentCharacter":
        """Restriction to U of chi_{alpha v_n}; the only fundamental
        coordinate it sees is the last one, with weight alpha^2."""
        space = chi.space
        if chi.vector != space.embed_n(
                (0,) * (space.n - 1) + (chi.vector[-1],)):
            raise ValueError("only multiples of v_n restrict to U characters here")
        alpha = chi.vector[-1]
        f = space.field
        coeffs = (0,) * (space.n - 1) + (f.mul(alpha, alpha),)
        return cls(space, chi.psi, coeffs)

    def value_from_components(self, comps) -> int:
        f = self.space.field
        acc = 0
        for c, x in zip(self.coefficients, comps):
            if c and x:
                acc = f.add(acc, f.mul(c, x))
        return self.psi.value(acc)

    def value(self, u: SympElement) -> int:
        return self.value_from_components(
            fundamental_components(self.space, u))

    def conjugated_by_torus(self, h: SympElement) -> "UnipotentCharacter":
        """The character u |-> sigma(h^{-1} u h), again in closed form."""
        space = self.space
        f = space.field
        n = space.n
        hcodes = [h.entry(i, i) for i in range(n)]
        new = []
        for i, c in enumerate(self.coefficients[:-1]):
            # conjugating scales the (i,i+1) coordinate by h_{i+1}^{-1} h_i
            new.append(f.mul(c, f.mul(f.inv(hcodes[i]), hcodes[i + 1])))
        new.append(f.mul(self.coefficients[-1],
                         f.mul(f.inv(hcodes[n - 1]), f.inv(hcodes[n - 1]))))
        return UnipotentCharacter(space, self.psi, tuple(new))

    def key(self) -> tuple:
        return (self.coefficients, self.psi.twist)
