"""The symplectic group Sp(2n,q) at desk scale.

Fixes a symplectic basis u_1..u_n, v_1..v_n (in that order), builds matrix
elements as flat tuples of field codes, and provides the named generators,
subgroups, Weyl-group machinery and exhaustive enumerators needed by the
verification suite.  The canonical integer key of an element is its entry
tuple read row-major as a base-q numeral; all set orderings derive from it.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .ffield import FieldDescriptor


class CapExceeded(RuntimeError):
    """Raised when an enumeration would exceed the configured cap."""


# ---------------------------------------------------------------------------
# Flat-tuple matrix helpers over a FieldDescriptor.
# ---------------------------------------------------------------------------

def mat_identity(d: int) -> tuple[int, ...]:
    return tuple(1 if r == c else 0 for r in range(d) for c in range(d))


def mat_mul(f: FieldDescriptor, a, b, d: int) -> tuple[int, ...]:
    if f.m == 1:
        p = f.p
        out = []
        for r in range(d):
            row = a[r * d:(r + 1) * d]
            for c in range(d):
                acc = 0
                for k in range(d):
                    acc += row[k] * b[k * d + c]
                out.append(acc % p)
        return tuple(out)
    out = []
    for r in range(d):
        row = a[r * d:(r + 1) * d]
        for c in range(d):
            acc = 0
            for k in range(d):
                x, y = row[k], b[k * d + c]
                if x and y:
                    acc = f.add(acc, f.mul(x, y))
            out.append(acc)
    return tuple(out)


def mat_vec(f: FieldDescriptor, a, vec, d: int) -> tuple[int, ...]:
    out = []
    for r in range(d):
        acc = 0
        for c in range(d):
            x, y = a[r * d + c], vec[c]
            if x and y:
                acc = f.add(acc, f.mul(x, y))
        out.append(acc)
    return tuple(out)


def mat_transpose(a, d: int) -> tuple[int, ...]:
    return tuple(a[c * d + r] for r in range(d) for c in range(d))


def mat_inv(f: FieldDescriptor, a, d: int) -> tuple[int, ...]:
    """Gauss-Jordan inverse; raises ZeroDivisionError if singular."""
    aug = [[a[r * d + c] for c in range(d)] + [1 if r == c else 0 for c in range(d)]
           for r in range(d)]
    for col in range(d):
        piv = next((r for r in range(col, d) if aug[r][col]), None)
        if piv is None:
            raise ZeroDivisionError("singular matrix")
        aug[col], aug[piv] = aug[piv], aug[col]
        inv_p = f.inv(aug[col][col])
        aug[col] = [f.mul(inv_p, x) for x in aug[col]]
        for r in range(d):
            if r != col and aug[r][col]:
                factor = aug[r][col]
                aug[r] = [f.sub(x, f.mul(factor, y))
                          for x, y in zip(aug[r], aug[col])]
    return tuple(aug[r][d + c] for r in range(d) for c in range(d))


def mat_det(f: FieldDescriptor, a, d: int) -> int:
    rows = [list(a[r * d:(r + 1) * d]) for r in range(d)]
    det = 1
    for col in range(d):
        piv = next((r for r in range(col, d) if rows[r][col]), None)
        if piv is None:
            return 0
        if piv != col:
            rows[col], rows[piv] = rows[piv], rows[col]
            det = f.neg(det)
        det = f.mul(det, rows[col][col])
        inv_p = f.inv(rows[col][col])
        for r in range(col + 1, d):
            if rows[r][col]:
                factor = f.mul(rows[r][col], inv_p)
                rows[r] = [f.sub(x, f.mul(factor, y))
                           for x, y in zip(rows[r], rows[col])]
    return det


class SymplecticSpace:
    """Dimension-2n space over F_q with the fixed symplectic basis pairing."""

    def __init__(self, n: int, field: FieldDescriptor):
        if n < 1:
            raise ValueError("rank parameter n must be positive")
        self.n = n
        self.field = field
        self.q = field.size
        self.dim = 2 * n
        d = self.dim
        gram = [0] * (d * d)
        for i in range(n):
            gram[i * d + (n + i)] = 1
            gram[(n + i) * d + i] = field.minus_one
        self.gram = tuple(gram)
        self.key_powers = tuple(self.q ** (d * d - 1 - k) for k in range(d * d))
        self._identity = SympElement(self, mat_identity(d), _validated=True)
        self._weyl: WeylGroup | None = None

    # -- vectors -----------------------------------------------------------

    def u_vector(self, i: int) -> tuple[int, ...]:
        """Coordinate vector of u_i (1-based)."""
        return tuple(1 if k == i - 1 else 0 for k in range(self.dim))

    def v_vector(self, i: int) -> tuple[int, ...]:
        """Coordinate vector of v_i (1-based)."""
        return tuple(1 if k == self.n + i - 1 else 0 for k in range(self.dim))

    def embed_n(self, ncoords) -> tuple[int, ...]:
        if len(ncoords) != self.n:
            raise ValueError("expected n coordinates")
        return (0,) * self.n + tuple(ncoords)

    def n_part(self, vec) -> tuple[int, ...]:
        return tuple(vec[self.n:])

    def m_part(self, vec) -> tuple[int, ...]:
        return tuple(vec[:self.n])

    def pairing(self, x, y) -> int:
        f, n = self.field, self.n
        acc = 0
        for i in range(n):
            a, b = x[i], y[n + i]
            if a and b:
                acc = f.add(acc, f.mul(a, b))
            a, b = x[n + i], y[i]
            if a and b:
                acc = f.sub(acc, f.mul(a, b))
        return acc

    def scale_vec(self, c: int, vec) -> tuple[int, ...]:
        f = self.field
        return tuple(f.mul(c, x) for x in vec)

    def add_vec(self, x, y) -> tuple[int, ...]:
        f = self.field
        return tuple(f.add(a, b) for a, b in zip(x, y))

    def neg_vec(self, x) -> tuple[int, ...]:
        f = self.field
        return tuple(f.neg(a) for a in x)

    # -- elements ------------------------------------------------------------

    @property
    def identity(self) -> "SympElement":
        return self._identity

    def element(self, entries) -> "SympElement":
        return SympElement(self, tuple(entries))

    def is_symplectic_matrix(self, entries) -> bool:
        d = self.dim
        cols = [tuple(entries[r * d + c] for r in range(d)) for c in range(d)]
        for a in range(d):
            for b in range(a + 1, d):
                if self.pairing(cols[a], cols[b]) != self.gram[a * d + b]:
                    return False
        return True

    @property
    def weyl(self) -> "WeylGroup":
        if self._weyl is None:
            self._weyl = WeylGroup(self)
        return self._weyl

    def __repr__(self):
        return f"Sp({self.dim},{self.field})"


class SympElement:
    """A matrix of Sp(2n,q): columns are images of the symplectic basis."""

    __slots__ = ("space", "entries", "key")

    def __init__(self, space: SymplecticSpace, entries: tuple[int, ...],
                 _validated: bool = False):
        if len(entries) != space.dim * space.dim:
            raise ValueError("wrong entry count")
        if not _validated and not space.is_symplectic_matrix(entries):
            raise ValueError("matrix does not preserve the symplectic form")
        self.space = space
        self.entries = entries
        key = 0
        q = space.q
        for e in entries:
            key = key * q + e
        self.key = key

    def __mul__(self, other: "SympElement") -> "SympElement":
        return SympElement(self.space,
                           mat_mul(self.space.field, self.entries,
                                   other.entries, self.space.dim),
                           _validated=True)

    def inverse(self) -> "SympElement":
        return SympElement(self.space,
                           mat_inv(self.space.field, self.entries, self.space.dim),
                           _validated=True)

    def __neg__(self) -> "SympElement":
        f = self.space.field
        return SympElement(self.space, tuple(f.neg(e) for e in self.entries),
                           _validated=True)

    def apply(self, vec) -> tuple[int, ...]:
        return mat_vec(self.space.field, self.entries, vec, self.space.dim)

    def entry(self, r: int, c: int) -> int:
        return self.entries[r * self.space.dim + c]

    def m_block(self) -> tuple[int, ...]:
        """Top-left n-by-n block (the action on M for Sp_M elements)."""
        n, d = self.space.n, self.space.dim
        return tuple(self.entries[r * d + c] for r in range(n) for c in range(n))

    def n_block(self) -> tuple[int, ...]:
        """Bottom-right n-by-n block (the action on N for Sp_M elements)."""
        n, d = self.space.n, self.space.dim
        return tuple(self.entries[(n + r) * d + (n + c)]
                     for r in range(n) for c in range(n))

    def top_right_block(self) -> tuple[int, ...]:
        n, d = self.space.n, self.space.dim
        return tuple(self.entries[r * d + (n + c)]
                     for r in range(n) for c in range(n))

    def bottom_left_block(self) -> tuple[int, ...]:
        n, d = self.space.n, self.space.dim
        return tuple(self.entries[(n + r) * d + c]
                     for r in range(n) for c in range(n))

    def __eq__(self, other):
        return isinstance(other, SympElement) and self.key == other.key \
            and self.space is other.space

    def __hash__(self):
        return hash(self.key)

    def __lt__(self, other):
        return self.key < other.key

    def __repr__(self):
        d = self.space.dim
        rows = [" ".join(str(self.entries[r * d + c]) for c in range(d))
                for r in range(d)]
        return "[" + "; ".join(rows) + "]"


# ---------------------------------------------------------------------------
# Named element constructors.
# ---------------------------------------------------------------------------

def root_index_set(n: int) -> list[tuple[int, int]]:
    """Pairs (i,j) with 1 <= i < j <= 2n and i <= n."""
    return [(i, j) for i in range(1, n + 1) for j in range(i + 1, 2 * n + 1)]


def root_element(space: SymplecticSpace, i: int, j: int, alpha: int) -> SympElement:
    """x_{i,j}(alpha): unipotent element of T (j <= n) or of Sp^M (j > n)."""
    n, d, f = space.n, space.dim, space.field
    if not (1 <= i < j <= 2 * n and i <= n):
        raise ValueError(f"({i},{j}) is not a root index for n={n}")
    ent = list(mat_identity(d))
    if j <= n:
        # block-diagonal with A = I + alpha E_{ij}, lower block its inverse
        # transpose: only two off-diagonal entries appear.
        ent[(i - 1) * d + (j - 1)] = alpha
        ent[(n + j - 1) * d + (n + i - 1)] = f.neg(alpha)
    else:
        jj = j - n
        ent[(i - 1) * d + (n + jj - 1)] = alpha
        ent[(jj - 1) * d + (n + i - 1)] = alpha
    return SympElement(space, tuple(ent))


def transvection(space: SymplecticSpace, u, alpha: int) -> SympElement:
    """rho_{u,alpha}: x |-> x + alpha <u,x> u."""
    d, f = space.dim, space.field
    cols = []
    for c in range(d):
        basis = tuple(1 if k == c else 0 for k in range(d))
        coef = f.mul(alpha, space.pairing(u, basis))
        cols.append(space.add_vec(basis, space.scale_vec(coef, u)))
    ent = tuple(cols[c][r] for r in range(d) for c in range(d))
    return SympElement(space, ent)


def adjacent_swap(space: SymplecticSpace, i: int) -> SympElement:
    """w_i: swaps u_i,u_{i+1} and v_i,v_{i+1} (1 <= i < n)."""
    n, d = space.n, space.dim
    if not 1 <= i < n:
        raise ValueError(f"swap index {i} out of range for n={n}")
    perm = list(range(d))
    perm[i - 1], perm[i] = perm[i], perm[i - 1]
    perm[n + i - 1], perm[n + i] = perm[n + i], perm[n + i - 1]
    ent = [0] * (d * d)
    for c in range(d):
        ent[perm[c] * d + c] = 1
    return SympElement(space, tuple(ent), _validated=True)


def sign_flip(space: SymplecticSpace, j: int) -> SympElement:
    """c_j: u_j |-> v_j, v_j |-> -u_j, other basis vectors fixed."""
    n, d, f = space.n, space.dim, space.field
    if not 1 <= j <= n:
        raise ValueError(f"flip index {j} out of range for n={n}")
    ent = [0] * (d * d)
    for k in range(d):
        if k == j - 1:
            ent[(n + j - 1) * d + k] = 1
        elif k == n + j - 1:
            ent[(j - 1) * d + k] = f.minus_one
        else:
            ent[k * d + k] = 1
    return SympElement(space, tuple(ent), _validated=True)


def longest_weyl(space: SymplecticSpace) -> SympElement:
    """w_0: u_i |-> v_i, v_i |-> -u_i for all i."""
    g = space.identity
    for j in range(1, space.n + 1):
        g = g * sign_flip(space, j)
    return g


def rotation(space: SymplecticSpace, i: int) -> SympElement:
    """The cycle sending u_n to u_i, u_k to u_{k+1} for i <= k < n (and the
    same on the v's); the identity at i = n."""
    n, d = space.n, space.dim
    if not 1 <= i <= n:
        raise ValueError(f"rotation index {i} out of range for n={n}")
    perm = list(range(d))
    for k in range(i, n):
        perm[k - 1] = k          # u_k -> u_{k+1}
        perm[n + k - 1] = n + k
    perm[n - 1] = i - 1          # u_n -> u_i
    perm[d - 1] = n + i - 1
    ent = [0] * (d * d)
    for c in range(d):
        ent[perm[c] * d + c] = 1
    return SympElement(space, tuple(ent), _validated=True)


def torus_element(space: SymplecticSpace, tcodes) -> SympElement:
    """Diagonal element with u_i-eigenvalue t_i and v_i-eigenvalue t_i^{-1}."""
    n, d, f = space.n, space.dim, space.field
    if len(tcodes) != n:
        raise ValueError("expected n torus coordinates")
    if any(t == 0 for t in tcodes):
        raise ValueError("torus coordinates must be nonzero")
    ent = [0] * (d * d)
    for i, t in enumerate(tcodes):
        ent[i * d + i] = t
        ent[(n + i) * d + (n + i)] = f.inv(t)
    return SympElement(space, tuple(ent), _validated=True)


def unipotent_e(space: SymplecticSpace, b: int, c: int, d: int) -> SympElement:
    """x_{n-1,2n-1}(b) x_{n-1,2n}(c) x_{n,2n}(d), an element of Sp^M (n >= 2)."""
    n = space.n
    if n < 2:
        raise ValueError("requires n >= 2")
    g = root_element(space, n - 1, 2 * n - 1, b)
    g = g * root_element(space, n - 1, 2 * n, c)
    return g * root_element(space, n, 2 * n, d)


def unipotent_d(space: SymplecticSpace, a: int) -> SympElement:
    """x_{n-1,n}(a), an element of T (n >= 2)."""
    if space.n < 2:
        raise ValueError("requires n >= 2")
    return root_element(space, space.n - 1, space.n, a)


# ---------------------------------------------------------------------------
# Weyl group: signed permutations of the n basis pairs.
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class WeylElement:
    """Signed permutation: pair i goes to pair perm[i], with a flip bit."""

    perm: tuple[int, ...]
    flips: tuple[int, ...]

    @staticmethod
    def identity(n: int) -> "WeylElement":
        return WeylElement(tuple(range(n)), (0,) * n)

    def compose(self, other: "WeylElement") -> "WeylElement":
        """self after other."""
        perm = tuple(self.perm[other.perm[i]] for i in range(len(self.perm)))
        flips = tuple(other.flips[i] ^ self.flips[other.perm[i]]
                      for i in range(len(self.perm)))
        return WeylElement(perm, flips)

    def inverse(self) -> "WeylElement":
        n = len(self.perm)
        pinv = [0] * n
        for i, j in enumerate(self.perm):
            pinv[j] = i
        return WeylElement(tuple(pinv), tuple(self.flips[pinv[j]] for j in range(n)))

    def one_line(self) -> tuple[int, ...]:
        """Signed one-line notation: position i maps to +-(perm[i]+1)."""
        return tuple(-(p + 1) if fl else (p + 1)
                     for p, fl in zip(self.perm, self.flips))


def length_by_inversions(w: WeylElement) -> int:
    """Inversion-count length for our generator convention (flip at slot n).

    Conjugating by the order-reversing relabelling carries the generators to
    the textbook hyperoctahedral set (flip at slot 1), where the length is
    inv(w) plus the sum of |w(i)| over negative entries.
    """
    n = len(w.perm)
    line = w.one_line()
    relabeled = [0] * n
    for i, val in enumerate(line):
        sign = -1 if val < 0 else 1
        relabeled[n - 1 - i] = sign * (n + 1 - abs(val))
    inv = sum(1 for a in range(n) for b in range(a + 1, n)
              if relabeled[a] > relabeled[b])
    return inv + sum(-v for v in relabeled if v < 0)


class WeylGroup:
    """BFS closure of the signed-permutation group on the generator images
    of w_1..w_{n-1}, c_n, with cached lengths, reduced words and lifts."""

    def __init__(self, space: SymplecticSpace):
        self.space = space
        n = space.n
        gens = [(f"w{i}", WeylElement(
            tuple(i if k == i - 1 else (i - 1 if k == i else k) for k in range(n)),
            (0,) * n)) for i in range(1, n)]
        gens.append(("cn", WeylElement(tuple(range(n)),
                                       tuple(0 if k < n - 1 else 1 for k in range(n)))))
        self.generator_names = [name for name, _ in gens]
        self.generators = [w for _, w in gens]
        self.generator_matrices = [adjacent_swap(space, i) for i in range(1, n)]
        self.generator_matrices.append(sign_flip(space, n))
        ident = WeylElement.identity(n)
        self._word: dict[WeylElement, tuple[int, ...]] = {ident: ()}
        queue = [ident]
        while queue:
            nxt = []
            for w in queue:
                for gi, gen in enumerate(self.generators):
                    new = gen.compose(w)
                    if new not in self._word:
                        self._word[new] = (gi,) + self._word[w]
                        nxt.append(new)
            queue = nxt
        self.elements = sorted(self._word, key=lambda w: (len(self._word[w]),
                                                          self._word[w]))
        assert len(self.elements) == 2 ** n * _factorial(n)
        self._lift: dict[WeylElement, SympElement] = {}
        self.longest = WeylElement(tuple(range(n)), (1,) * n)

    def length(self, w: WeylElement) -> int:
        return len(self._word[w])

    def word(self, w: WeylElement) -> tuple[int, ...]:
        return self._word[w]

    def lift(self, w: WeylElement) -> SympElement:
        """Deterministic representative in W_2: the reduced word evaluated
        left-to-right in generator matrices."""
        cached = self._lift.get(w)
        if cached is None:
            g = self.space.identity
            for gi in self._word[w]:
                g = g * self.generator_matrices[gi]
            self._lift[w] = cached = g
        return cached

    def class_of(self, g: SympElement) -> WeylElement:
        """Signed-permutation class of a monomial element of W_2 H."""
        n, d = self.space.n, self.space.dim
        perm = [0] * n
        flips = [0] * n
        for i in range(n):
            col = [g.entries[r * d + i] for r in range(d)]
            nz = [r for r, e in enumerate(col) if e]
            if len(nz) != 1:
                raise ValueError("element is not monomial on the basis pairs")
            r = nz[0]
            perm[i], flips[i] = (r, 0) if r < n else (r - n, 1)
        return WeylElement(tuple(perm), tuple(flips))


def _factorial(n: int) -> int:
    out = 1
    for k in range(2, n + 1):
        out *= k
    return out


# ---------------------------------------------------------------------------
# Subgroups: identifiers, orders, membership, enumeration.
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SubgroupId:
    tag: str
    w: WeylElement | None = None
    root: tuple[int, int] | None = None
    vector: tuple[int, ...] | None = None

    @staticmethod
    def sylow() -> "SubgroupId":
        return SubgroupId("U")

    @staticmethod
    def torus_part() -> "SubgroupId":
        return SubgroupId("T")

    @staticmethod
    def torus() -> "SubgroupId":
        return SubgroupId("H")

    @staticmethod
    def borel() -> "SubgroupId":
        return SubgroupId("B")

    @staticmethod
    def pointwise_m() -> "SubgroupId":
        return SubgroupId("SpM_pointwise")

    @staticmethod
    def both_stabilizer() -> "SubgroupId":
        return SubgroupId("SpMN")

    @staticmethod
    def m_stabilizer() -> "SubgroupId":
        return SubgroupId("SpM")

    @staticmethod
    def u_plus(w: WeylElement) -> "SubgroupId":
        return SubgroupId("U_plus", w=w)

    @staticmethod
    def u_minus(w: WeylElement) -> "SubgroupId":
        return SubgroupId("U_minus", w=w)

    @staticmethod
    def x_root(i: int, j: int) -> "SubgroupId":
        return SubgroupId("X_root", root=(i, j))

    @staticmethod
    def vector_stabilizer(ncoords, hat: bool = False) -> "SubgroupId":
        return SubgroupId("S_v_hat" if hat else "S_v", vector=tuple(ncoords))


def subgroup_order(space: SymplecticSpace, sid: SubgroupId) -> int | None:
    """Closed-form order where one is stated; None for the filtered ones."""
    n, q = space.n, space.q
    if sid.tag == "U":
        return q ** (n * n)
    if sid.tag == "T":
        return q ** (n * (n - 1) // 2)
    if sid.tag == "SpM_pointwise":
        return q ** (n * (n + 1) // 2)
    if sid.tag == "H":
        return (q - 1) ** n
    if sid.tag == "B":
        return q ** (n * n) * (q - 1) ** n
    if sid.tag == "SpMN":
        return gl_order(n, q)
    if sid.tag == "SpM":
        return q ** (n * (n + 1) // 2) * gl_order(n, q)
    if sid.tag == "U_plus":
        return q ** (n * n - space.weyl.length(sid.w))
    if sid.tag == "U_minus":
        return q ** space.weyl.length(sid.w)
    if sid.tag == "X_root":
        return q
    return None


def gl_order(n: int, q: int) -> int:
    out = 1
    for i in range(n):
        out *= q ** n - q ** i
    return out


def sp_order(n: int, q: int) -> int:
    out = q ** (n * n)
    for i in range(1, n + 1):
        out *= q ** (2 * i) - 1
    return out


def two_valuation(m: int) -> int:
    if m <= 0:
        raise ValueError("two_valuation of a non-positive integer")
    v = 0
    while m % 2 == 0:
        m //= 2
        v += 1
    return v


def _is_upper_unitriangular(f, a, n) -> bool:
    for r in range(n):
        if a[r * n + r] != 1:
            return False
        for c in range(r):
            if a[r * n + c]:
                return False
    return True


def in_sp_m(g: SympElement) -> bool:
    """Global stabilizer of M: bottom-left block zero."""
    return all(e == 0 for e in g.bottom_left_block())


def in_pointwise_m(g: SympElement) -> bool:
    n, d = g.space.n, g.space.dim
    ident = mat_identity(n)
    if g.m_block() != ident or g.n_block() != ident:
        return False
    if any(g.bottom_left_block()):
        return False
    s = g.top_right_block()
    return s == mat_transpose(s, n)


def in_both_stabilizer(g: SympElement) -> bool:
    return not any(g.bottom_left_block()) and not any(g.top_right_block())


def in_torus_part(g: SympElement) -> bool:
    return in_both_stabilizer(g) and \
        _is_upper_unitriangular(g.space.field, g.m_block(), g.space.n)


def in_torus(g: SympElement) -> bool:
    d = g.space.dim
    return all(g.entries[r * d + c] == 0
               for r in range(d) for c in range(d) if r != c)


def in_sylow(g: SympElement) -> bool:
    return in_sp_m(g) and \
        _is_upper_unitriangular(g.space.field, g.m_block(), g.space.n)


def in_borel(g: SympElement) -> bool:
    if not in_sp_m(g):
        return False
    a = g.m_block()
    n = g.space.n
    return all(a[r * n + c] == 0 for r in range(n) for c in range(r)) and \
        all(a[r * n + r] != 0 for r in range(n))


def split_sp_m(g: SympElement) -> tuple[SympElement, SympElement]:
    """Factor g in Sp_M as s * a with s pointwise on M and a block-diagonal."""
    if not in_sp_m(g):
        raise ValueError("element does not stabilize M")
    space = g.space
    n, d, f = space.n, space.dim, space.field
    a_blk = g.m_block()
    ent = [0] * (d * d)
    for r in range(n):
        for c in range(n):
            ent[r * d + c] = a_blk[r * n + c]
    nblk = mat_transpose(mat_inv(f, a_blk, n), n)
    for r in range(n):
        for c in range(n):
            ent[(n + r) * d + (n + c)] = nblk[r * n + c]
    a = SympElement(space, tuple(ent), _validated=True)
    s = g * a.inverse()
    assert in_pointwise_m(s), "split produced a bad pointwise factor"
    return s, a


def subgroup_contains(space: SymplecticSpace, sid: SubgroupId,
                      g: SympElement) -> bool:
    tag = sid.tag
    if tag == "U":
        return in_sylow(g)
    if tag == "T":
        return in_torus_part(g)
    if tag == "H":
        return in_torus(g)
    if tag == "B":
        return in_borel(g)
    if tag == "SpM_pointwise":
        return in_pointwise_m(g)
    if tag == "SpMN":
        return in_both_stabilizer(g)
    if tag == "SpM":
        return in_sp_m(g)
    if tag == "U_plus":
        if not in_sylow(g):
            return False
        lift = space.weyl.lift(sid.w)
        return in_sylow(lift * g * lift.inverse())
    if tag == "U_minus":
        if not in_sylow(g):
            return False
        lift = space.weyl.lift(sid.w)
        w0 = space.weyl.lift(space.weyl.longest)
        return in_sylow(w0.inverse() * (lift * g * lift.inverse()) * w0)
    if tag == "X_root":
        i, j = sid.root
        return any(g == root_element(space, i, j, al) for al in range(space.q))
    if tag in ("S_v", "S_v_hat"):
        if not in_sp_m(g):
            raise ValueError("stabilizer membership requires an element of Sp_M")
        v = space.embed_n(sid.vector)
        gv = g.apply(v)
        if space.n_part(gv) == space.n_part(v):
            return True
        if tag == "S_v_hat":
            return space.n_part(gv) == space.n_part(space.neg_vec(v))
        return False
    raise ValueError(f"unknown subgroup tag {tag!r}")


def _enumerate_pointwise_m(space: SymplecticSpace):
    n, d, f = space.n, space.dim, space.field
    free = [(r, c) for r in range(n) for c in range(r, n)]
    for vals in itertools.product(range(space.q), repeat=len(free)):
        ent = list(mat_identity(d))
        for (r, c), val in zip(free, vals):
            ent[r * d + (n + c)] = val
            ent[c * d + (n + r)] = val
        yield SympElement(space, tuple(ent), _validated=True)


def _block_diag(space: SymplecticSpace, a_blk) -> SympElement:
    n, d, f = space.n, space.dim, space.field
    ent = [0] * (d * d)
    nblk = mat_transpose(mat_inv(f, a_blk, n), n)
    for r in range(n):
        for c in range(n):
            ent[r * d + c] = a_blk[r * n + c]
            ent[(n + r) * d + (n + c)] = nblk[r * n + c]
    return SympElement(space, tuple(ent), _validated=True)


def _enumerate_torus_part(space: SymplecticSpace):
    n = space.n
    free = [(r, c) for r in range(n) for c in range(r + 1, n)]
    for vals in itertools.product(range(space.q), repeat=len(free)):
        a_blk = list(mat_identity(n))
        for (r, c), val in zip(free, vals):
            a_blk[r * n + c] = val
        yield _block_diag(space, tuple(a_blk))


def _enumerate_both_stabilizer(space: SymplecticSpace):
    n, f = space.n, space.field
    for vals in itertools.product(range(space.q), repeat=n * n):
        if mat_det(f, vals, n) != 0:
            yield _block_diag(space, tuple(vals))


def _enumerate_torus(space: SymplecticSpace):
    for tcodes in itertools.product(space.field.nonzero_codes(), repeat=space.n):
        yield torus_element(space, tcodes)


def enumerate_subgroup(space: SymplecticSpace, sid: SubgroupId,
                       cap: int = 10 ** 7) -> list[SympElement]:
    """All elements, duplicate-free, sorted by canonical key."""
    order = subgroup_order(space, sid)
    if order is not None and order > cap:
        raise CapExceeded(f"|{sid.tag}| = {order} exceeds cap {cap}")
    tag = sid.tag
    if tag == "SpM_pointwise":
        out = list(_enumerate_pointwise_m(space))
    elif tag == "T":
        out = list(_enumerate_torus_part(space))
    elif tag == "SpMN":
        out = list(_enumerate_both_stabilizer(space))
    elif tag == "H":
        out = list(_enumerate_torus(space))
    elif tag == "U":
        out = [t * s for t in _enumerate_torus_part(space)
               for s in _enumerate_pointwise_m(space)]
    elif tag == "B":
        out = [u * h for u in enumerate_subgroup(space, SubgroupId.sylow(), cap)
               for h in _enumerate_torus(space)]
    elif tag == "SpM":
        out = [s * a for s in _enumerate_pointwise_m(space)
               for a in _enumerate_both_stabilizer(space)]
    elif tag in ("U_plus", "U_minus"):
        out = [g for g in enumerate_subgroup(space, SubgroupId.sylow(), cap)
               if subgroup_contains(space, sid, g)]
    elif tag == "X_root":
        i, j = sid.root
        out = [root_element(space, i, j, al) for al in range(space.q)]
    elif tag in ("S_v", "S_v_hat"):
        out = [g for g in enumerate_subgroup(space, SubgroupId.m_stabilizer(), cap)
               if subgroup_contains(space, sid, g)]
    else:
        raise ValueError(f"unknown subgroup tag {tag!r}")
    if len(out) > cap:
        raise CapExceeded(f"enumeration of {tag} exceeded cap {cap}")
    out.sort(key=lambda g: g.key)
    for a, b in zip(out, out[1:]):
        assert a.key != b.key, "duplicate element in enumeration"
    if order is not None:
        assert len(out) == order, \
            f"|{tag}| = {len(out)} but closed form gives {order}"
    return out


def factor_unipotent(space: SymplecticSpace, u: SympElement, w: WeylElement,
                     minus_list: list[SympElement] | None = None
                     ) -> tuple[SympElement, SympElement]:
    """Write u in U as u_plus * u_minus with the unique stated memberships."""
    if not in_sylow(u):
        raise ValueError("element is not in the Sylow subgroup U")
    if minus_list is None:
        minus_list = enumerate_subgroup(space, SubgroupId.u_minus(w))
    plus_id = SubgroupId.u_plus(w)
    for um in minus_list:
        up = u * um.inverse()
        if subgroup_contains(space, plus_id, up):
            return up, um
    raise AssertionError("no factorization found; U != U_w^+ U_w^-")


def parabolic_orders(space: SymplecticSpace, cap: int = 10 ** 7
                     ) -> tuple[int, int]:
    """(|B|, |B u B c_n B|) by explicit enumeration of the double coset.

    Every element of B c_n B is b c_n v with v in the negative root subgroup
    of c_n, so (q+1)|B| matrices cover the candidate set.
    """
    borel = enumerate_subgroup(space, SubgroupId.borel(), cap)
    cn = sign_flip(space, space.n)
    minus = [root_element(space, space.n, 2 * space.n, al)
             for al in range(space.q)]
    keys = {g.key for g in borel}
    if (space.q + 1) * len(borel) > cap:
        raise CapExceeded("parabolic enumeration exceeds cap")
    for b in borel:
        bc = b * cn
        for v in minus:
            keys.add((bc * v).key)
    return len(borel), len(keys)


# ---------------------------------------------------------------------------
# Generator sets used by the representation modules.
# ---------------------------------------------------------------------------

def root_parameters(space: SymplecticSpace) -> list[int]:
    """Scalars used for root-subgroup generators: 1, the least non-square
    (odd q), and generator powers spanning F_q over its prime field."""
    from .ffield import is_square
    f = space.field
    params = {1}
    if f.p != 2:
        params.add(next(a for a in f.nonzero_codes() if not is_square(f, a)))
    for k in range(1, f.m):
        params.add(f.pow(f.generator, k))
    return sorted(params)


def sylow_generators(space: SymplecticSpace) -> list[SympElement]:
    params = root_parameters(space)
    return [root_element(space, i, j, al)
            for (i, j) in root_index_set(space.n) for al in params]


def torus_generators(space: SymplecticSpace) -> list[SympElement]:
    f = space.field
    out = []
    for k in range(space.n):
        tcodes = [1] * space.n
        tcodes[k] = f.generator
        out.append(torus_element(space, tcodes))
    return out


def borel_generators(space: SymplecticSpace) -> list[SympElement]:
    return sylow_generators(space) + torus_generators(space)


def m_stabilizer_generators(space: SymplecticSpace) -> list[SympElement]:
    swaps = [adjacent_swap(space, i) for i in range(1, space.n)]
    return borel_generators(space) + swaps


def sp_generators(space: SymplecticSpace) -> list[SympElement]:
    """Generators of the whole group: the M-stabilizer set plus the
    transvection rho_{v_n,-1}, which lies outside Sp_M."""
    extra = transvection(space, space.v_vector(space.n),
                         space.field.minus_one)
    return m_stabilizer_generators(space) + [extra]
