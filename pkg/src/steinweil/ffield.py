"""Exact arithmetic in small finite fields GF(p^m) and their additive characters.

Elements are canonical integer codes in 0..p^m-1: the base-p value of the
coefficient vector of the residue polynomial, constant term first (the code of
c_0 + c_1 x + ... is c_0 + c_1 p + ...).  All orderings and map keys across the
package derive from these codes.  A descriptor fixes a monic irreducible
modulus and precomputes discrete-log tables, so scalar operations are table
lookups and bulk operations are vectorized over numpy code arrays.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


def _prime_factors(n: int) -> list[int]:
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


# ---------------------------------------------------------------------------
# Polynomial helpers over the prime field (coefficient lists, constant first).
# ---------------------------------------------------------------------------

def _poly_trim(c: list[int]) -> list[int]:
    while c and c[-1] == 0:
        c.pop()
    return c


def _poly_mul(a: list[int], b: list[int], p: int) -> list[int]:
    out = [0] * (len(a) + len(b) - 1) if a and b else []
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] = (out[i + j] + ai * bj) % p
    return _poly_trim(out)


def _poly_mod(a: list[int], modulus: list[int], p: int) -> list[int]:
    a = list(a)
    dm = len(modulus) - 1
    while len(a) - 1 >= dm and a:
        lead = a[-1]
        if lead:
            shift = len(a) - 1 - dm
            for i, mi in enumerate(modulus):
                a[shift + i] = (a[shift + i] - lead * mi) % p
        a.pop()
    return _poly_trim(a)


def _poly_mulmod(a, b, modulus, p):
    return _poly_mod(_poly_mul(a, b, p), modulus, p)


def _poly_powmod(a: list[int], e: int, modulus: list[int], p: int) -> list[int]:
    result = [1]
    base = _poly_mod(list(a), modulus, p)
    while e:
        if e & 1:
            result = _poly_mulmod(result, base, modulus, p)
        base = _poly_mulmod(base, base, modulus, p)
        e >>= 1
    return result


def _poly_gcd(a: list[int], b: list[int], p: int) -> list[int]:
    a, b = list(a), list(b)
    while b:
        # reduce a mod b, using the inverse of b's leading coefficient
        inv_lead = pow(b[-1], p - 2, p)
        r = list(a)
        while r and len(r) >= len(b):
            factor = (r[-1] * inv_lead) % p
            shift = len(r) - len(b)
            for i, bi in enumerate(b):
                r[shift + i] = (r[shift + i] - factor * bi) % p
            _poly_trim(r)
        a, b = b, r
    return a


def is_irreducible(modulus: list[int], p: int) -> bool:
    """Rabin test: x^(p^m) = x mod f and gcd(x^(p^(m/r)) - x, f) = 1."""
    m = len(modulus) - 1
    if m < 1 or modulus[-1] != 1:
        return False
    if m == 1:
        return True
    x = [0, 1]
    for r in _prime_factors(m):
        h = _poly_powmod(x, p ** (m // r), modulus, p)
        h = _poly_trim([(hi - xi) % p for hi, xi in
                        zip(h + [0] * len(x), x + [0] * len(h))])
        if len(_poly_gcd(modulus, h, p)) != 1:
            return False
    total = _poly_powmod(x, p ** m, modulus, p)
    return total == x


def default_modulus(p: int, m: int) -> tuple[int, ...]:
    """First monic irreducible of degree m over F_p in code order.

    Reproduces the pinned table: GF(4): x^2+x+1, GF(8): x^3+x+1,
    GF(16): x^4+x+1, GF(9): x^2+1.
    """
    if m == 1:
        return (0, 1)
    for low in range(p ** m):
        coeffs = []
        rest = low
        for _ in range(m):
            coeffs.append(rest % p)
            rest //= p
        coeffs.append(1)
        if is_irreducible(coeffs, p):
            return tuple(coeffs)
    raise AssertionError("no irreducible polynomial found")  # unreachable


class FieldDescriptor:
    """GF(p^m) with a fixed monic irreducible modulus and lookup tables."""

    def __init__(self, characteristic: int, degree: int = 1,
                 modulus: tuple[int, ...] | list[int] | None = None):
        if not is_prime(characteristic):
            raise ValueError(f"characteristic {characteristic} is not prime")
        if degree < 1:
            raise ValueError(f"degree must be positive, got {degree}")
        p, m = characteristic, degree
        if modulus is None:
            modulus = default_modulus(p, m)
        modulus = tuple(c % p for c in modulus[:-1]) + (modulus[-1],)
        if len(modulus) != m + 1 or modulus[-1] != 1:
            raise ValueError(f"modulus must be monic of degree {m}")
        if not is_irreducible(list(modulus), p):
            raise ValueError(f"modulus {modulus} is reducible over GF({p})")
        self.p = p
        self.m = m
        self.modulus = modulus
        self.size = p ** m
        self._init_tables()

    def _init_tables(self):
        p, m, s = self.p, self.m, self.size
        self.powers = np.array([p ** i for i in range(m)], dtype=np.int64)
        codes = np.arange(s, dtype=np.int64)
        digits = np.empty((s, m), dtype=np.int64)
        rest = codes.copy()
        for i in range(m):
            digits[:, i] = rest % p
            rest //= p
        self.digits = digits
        gen = self._find_generator()
        self.generator = gen
        exp = np.zeros(s - 1, dtype=np.int64)
        log = np.full(s, -1, dtype=np.int64)
        acc = [1]
        gpoly = self._decode(gen)
        for k in range(s - 1):
            code = self._encode(acc)
            exp[k] = code
            log[code] = k
            acc = _poly_mulmod(acc, gpoly, list(self.modulus), p)
        self.exp = exp
        self.log = log

    def _decode(self, code: int) -> list[int]:
        out = []
        for _ in range(self.m):
            out.append(code % self.p)
            code //= self.p
        return _poly_trim(out)

    def _encode(self, poly: list[int]) -> int:
        code = 0
        for i, c in enumerate(poly):
            code += (c % self.p) * self.p ** i
        return code

    def _find_generator(self) -> int:
        s = self.size
        if s == 2:
            return 1
        factors = _prime_factors(s - 1)
        for cand in range(2, s):
            cpoly = self._decode(cand)
            if all(_poly_powmod(cpoly, (s - 1) // r, list(self.modulus), self.p) != [1]
                   for r in factors):
                return cand
        raise AssertionError("no multiplicative generator found")  # unreachable

    # -- scalar operations on codes ----------------------------------------

    def add(self, a: int, b: int) -> int:
        if self.m == 1:
            return (a + b) % self.p
        return int(((self.digits[a] + self.digits[b]) % self.p) @ self.powers)

    def sub(self, a: int, b: int) -> int:
        if self.m == 1:
            return (a - b) % self.p
        return int(((self.digits[a] - self.digits[b]) % self.p) @ self.powers)

    def neg(self, a: int) -> int:
        if self.m == 1:
            return (-a) % self.p
        return int(((-self.digits[a]) % self.p) @ self.powers)

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        return int(self.exp[(self.log[a] + self.log[b]) % (self.size - 1)])

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inversion of zero field element")
        return int(self.exp[(-self.log[a]) % (self.size - 1)])

    def pow(self, a: int, e: int) -> int:
        if a == 0:
            if e < 0:
                raise ZeroDivisionError("inversion of zero field element")
            return 0 if e else 1
        return int(self.exp[(int(self.log[a]) * e) % (self.size - 1)])

    def frobenius(self, a: int) -> int:
        return self.pow(a, self.p)

    def trace_to_prime(self, a: int) -> int:
        """Sum of the m Frobenius conjugates; a residue modulo p."""
        acc = a
        conj = a
        for _ in range(self.m - 1):
            conj = self.frobenius(conj)
            acc = self.add(acc, conj)
        assert acc < self.p, "trace left the prime subfield"
        return acc

    @property
    def minus_one(self) -> int:
        return self.p - 1

    def scalar(self, value: int) -> int:
        """Code of the prime-subfield element value mod p."""
        return value % self.p

    # -- vectorized operations on int64 code arrays ------------------------

    def vadd(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        if self.m == 1:
            return (a + b) % self.p
        return ((self.digits[a] + self.digits[b]) % self.p) @ self.powers

    def vneg(self, a: np.ndarray) -> np.ndarray:
        if self.m == 1:
            return (-a) % self.p
        return ((-self.digits[a]) % self.p) @ self.powers

    def vmul(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        out = np.zeros(np.broadcast(a, b).shape, dtype=np.int64)
        mask = (a != 0) & (b != 0)
        la = self.log[np.broadcast_to(a, out.shape)[mask]]
        lb = self.log[np.broadcast_to(b, out.shape)[mask]]
        out[mask] = self.exp[(la + lb) % (self.size - 1)]
        return out

    def vscale(self, a: np.ndarray, c: int) -> np.ndarray:
        if c == 0:
            return np.zeros_like(a)
        out = np.zeros_like(a)
        mask = a != 0
        out[mask] = self.exp[(self.log[a[mask]] + self.log[c]) % (self.size - 1)]
        return out

    def vinv(self, a: np.ndarray) -> np.ndarray:
        if np.any(a == 0):
            raise ZeroDivisionError("inversion of zero field element")
        return self.exp[(-self.log[a]) % (self.size - 1)]

    def vsum_groups(self, vals: np.ndarray, starts: np.ndarray) -> np.ndarray:
        """Field sums of contiguous groups, groups starting at `starts`."""
        if self.m == 1:
            return np.add.reduceat(vals, starts) % self.p
        sums = np.add.reduceat(self.digits[vals], starts, axis=0) % self.p
        return sums @ self.powers

    # -- element iteration and wrappers ------------------------------------

    def element(self, code: int) -> "FieldElement":
        if not 0 <= code < self.size:
            raise ValueError(f"code {code} out of range for {self}")
        return FieldElement(self, code)

    def from_coefficients(self, coeffs) -> "FieldElement":
        if len(coeffs) != self.m:
            raise ValueError("coefficient vector length must equal the degree")
        return FieldElement(self, self._encode([c % self.p for c in coeffs]))

    def elements(self):
        return (FieldElement(self, c) for c in range(self.size))

    def nonzero_codes(self) -> range:
        return range(1, self.size)

    def __eq__(self, other):
        return (isinstance(other, FieldDescriptor)
                and (self.p, self.m, self.modulus) == (other.p, other.m, other.modulus))

    def __hash__(self):
        return hash((self.p, self.m, self.modulus))

    def __repr__(self):
        if self.m == 1:
            return f"GF({self.p})"
        return f"GF({self.p}^{self.m})"


@dataclass(frozen=True)
class FieldElement:
    """An element of a fixed FieldDescriptor, in canonical code form."""

    field: FieldDescriptor
    code: int

    def _check(self, other: "FieldElement"):
        if self.field != other.field:
            raise ValueError("mixed-field operands")

    def __add__(self, other):
        self._check(other)
        return FieldElement(self.field, self.field.add(self.code, other.code))

    def __sub__(self, other):
        self._check(other)
        return FieldElement(self.field, self.field.sub(self.code, other.code))

    def __neg__(self):
        return FieldElement(self.field, self.field.neg(self.code))

    def __mul__(self, other):
        self._check(other)
        return FieldElement(self.field, self.field.mul(self.code, other.code))

    def __pow__(self, e: int):
        return FieldElement(self.field, self.field.pow(self.code, e))

    def inverse(self):
        return FieldElement(self.field, self.field.inv(self.code))

    @property
    def coefficients(self) -> tuple[int, ...]:
        return tuple(int(d) for d in self.field.digits[self.code])

    def __bool__(self):
        return self.code != 0

    def __repr__(self):
        return f"{self.field}:{self.code}"


class AdditiveCharacter:
    """Nontrivial character of F_q^+ into F^*: a |-> zeta^(lift Tr(kappa a)).

    zeta is the canonical p-th root of unity in F (the (|F|-1)/p power of the
    fixed multiplicative generator); kappa is the twist, a nonzero element of
    F_q.  Twisting by kappa' composes multiplicatively.
    """

    def __init__(self, source: FieldDescriptor, target: FieldDescriptor,
                 twist: int = 1):
        p = source.p
        if target.p == p:
            raise ValueError("coefficient field characteristic must differ from p")
        if (target.size - 1) % p != 0:
            raise ValueError(
                f"{target} has no primitive {p}-th root of unity")
        if not 0 < twist < source.size:
            raise ValueError("twist must be a nonzero source-field code")
        self.source = source
        self.target = target
        self.twist = twist
        self.zeta = target.pow(target.generator, (target.size - 1) // p)
        assert target.pow(self.zeta, p) == 1 and self.zeta != 1
        self._table = np.array(
            [target.pow(self.zeta, source.trace_to_prime(source.mul(twist, a)))
             for a in range(source.size)], dtype=np.int64)
        if not np.any(self._table != 1):
            raise AssertionError("character is trivial")  # cannot happen

    def value(self, alpha: int) -> int:
        """Value at the source-field code alpha, as a target-field code."""
        return int(self._table[alpha])

    def twisted(self, kappa: int) -> "AdditiveCharacter":
        return AdditiveCharacter(self.source, self.target,
                                 self.source.mul(self.twist, kappa))

    def __repr__(self):
        return f"AdditiveCharacter({self.source}->{self.target}, twist={self.twist})"


def gauss_sum(chi: AdditiveCharacter) -> int:
    """Sum of chi(a^2) over the source field; code in the target field."""
    fq, f = chi.source, chi.target
    if fq.p == 2:
        raise ValueError("quadratic Gauss sum requires odd characteristic")
    acc = 0
    for a in range(fq.size):
        acc = f.add(acc, chi.value(fq.mul(a, a)))
    return acc


def is_square(fq: FieldDescriptor, alpha: int) -> bool:
    """Whether nonzero alpha is a square in F_q, for odd q."""
    if fq.p == 2:
        raise ValueError("square test is only meaningful in odd characteristic")
    if alpha == 0:
        raise ValueError("square test requires a nonzero element")
    return fq.pow(alpha, (fq.size - 1) // 2) == 1


def least_nonsquare(fq: FieldDescriptor) -> int:
    for a in fq.nonzero_codes():
        if not is_square(fq, a):
            return a
    raise ValueError(f"every element of {fq} is a square")


def transversal(fq: FieldDescriptor) -> list[int]:
    """Transversal of the {1,-1}-action on F_q^*: the smaller code per pair.

    (q-1)/2 codes for odd q; all of F_q^* in characteristic 2.
    """
    if fq.p == 2:
        return list(fq.nonzero_codes())
    return [a for a in fq.nonzero_codes() if a < fq.neg(a)]
