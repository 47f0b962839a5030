"""Finite-dimensional representations over the coefficient field, with the
decision procedures the verification suite relies on: exact echelon linear
algebra on code arrays, spinning closures, exhaustive irreducibility,
commutants, intertwiner spaces, and isomorphism tests.

Matrices over F are numpy int64 arrays of canonical field codes; all
eliminations go through the field's table-backed vector operations, so every
result is exact.
"""

from __future__ import annotations

import random

import numpy as np

from .ffield import FieldDescriptor
from .spgroup import SympElement


class CapExceeded(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# Exact linear algebra on code arrays.
# ---------------------------------------------------------------------------

def f_identity(f: FieldDescriptor, d: int) -> np.ndarray:
    out = np.zeros((d, d), dtype=np.int64)
    np.fill_diagonal(out, 1)
    return out


def f_matmul(f: FieldDescriptor, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    out = np.zeros((a.shape[0], b.shape[1]), dtype=np.int64)
    for k in range(a.shape[1]):
        out = f.vadd(out, f.vmul(a[:, k:k + 1], b[k:k + 1, :]))
    return out


def f_matvec(f: FieldDescriptor, a: np.ndarray, v: np.ndarray) -> np.ndarray:
    out = np.zeros(a.shape[0], dtype=np.int64)
    for k in range(a.shape[1]):
        if v[k]:
            out = f.vadd(out, f.vscale(a[:, k], int(v[k])))
    return out


def f_rref(f: FieldDescriptor, mat: np.ndarray) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form (copy) and the pivot column list."""
    m = mat.astype(np.int64).copy()
    rows, cols = m.shape
    pivots = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.nonzero(m[r:, c])[0]
        if nz.size == 0:
            continue
        piv = r + int(nz[0])
        if piv != r:
            m[[r, piv]] = m[[piv, r]]
        m[r] = f.vscale(m[r], f.inv(int(m[r, c])))
        col = m[:, c].copy()
        col[r] = 0
        mask = col != 0
        if mask.any():
            factors = f.vneg(col[mask])
            m[mask] = f.vadd(m[mask], f.vmul(factors[:, None], m[r][None, :]))
        pivots.append(c)
        r += 1
    return m[:r], pivots


def f_rank(f: FieldDescriptor, mat: np.ndarray) -> int:
    return len(f_rref(f, mat)[1])


def f_nullspace(f: FieldDescriptor, mat: np.ndarray) -> np.ndarray:
    """Rows spanning {x : mat @ x = 0}, one per free column."""
    rref, pivots = f_rref(f, mat)
    cols = mat.shape[1]
    free = [c for c in range(cols) if c not in pivots]
    out = np.zeros((len(free), cols), dtype=np.int64)
    for k, fc in enumerate(free):
        out[k, fc] = 1
        for r, pc in enumerate(pivots):
            out[k, pc] = f.neg(int(rref[r, fc]))
    return out


def f_solve(f: FieldDescriptor, a: np.ndarray, b: np.ndarray) -> np.ndarray | None:
    """One solution x of a @ x = b, or None if inconsistent."""
    aug = np.concatenate([a, b.reshape(-1, 1)], axis=1)
    rref, pivots = f_rref(f, aug)
    if a.shape[1] in pivots:
        return None
    x = np.zeros(a.shape[1], dtype=np.int64)
    for r, pc in enumerate(pivots):
        x[pc] = rref[r, -1]
    return x


def f_det(f: FieldDescriptor, mat: np.ndarray) -> int:
    m = mat.astype(np.int64).copy()
    d = m.shape[0]
    det = 1
    for c in range(d):
        nz = np.nonzero(m[c:, c])[0]
        if nz.size == 0:
            return 0
        piv = c + int(nz[0])
        if piv != c:
            m[[c, piv]] = m[[piv, c]]
            det = f.neg(det)
        det = f.mul(det, int(m[c, c]))
        inv_p = f.inv(int(m[c, c]))
        for r in range(c + 1, d):
            if m[r, c]:
                m[r] = f.vadd(m[r], f.vscale(m[c], f.neg(f.mul(int(m[r, c]), inv_p))))
    return det


def f_inv_matrix(f: FieldDescriptor, mat: np.ndarray) -> np.ndarray:
    d = mat.shape[0]
    aug = np.concatenate([mat.astype(np.int64), f_identity(f, d)], axis=1)
    rref, pivots = f_rref(f, aug)
    if pivots != list(range(d)):
        raise ZeroDivisionError("singular matrix")
    return rref[:, d:]


class Subspace:
    """Subspace of F^d held in reduced-echelon canonical form."""

    def __init__(self, field: FieldDescriptor, ambient_dim: int,
                 vectors: np.ndarray | None = None):
        self.field = field
        self.ambient_dim = ambient_dim
        if vectors is None or len(vectors) == 0:
            self.rows = np.zeros((0, ambient_dim), dtype=np.int64)
            self.pivots: list[int] = []
        else:
            self.rows, self.pivots = f_rref(field, np.asarray(vectors))

    @property
    def dim(self) -> int:
        return self.rows.shape[0]

    def reduce(self, v: np.ndarray) -> np.ndarray:
        f = self.field
        v = v.astype(np.int64).copy()
        for r, pc in enumerate(self.pivots):
            if v[pc]:
                v = f.vadd(v, f.vscale(self.rows[r], f.neg(int(v[pc]))))
        return v

    def contains(self, v: np.ndarray) -> bool:
        return not np.any(self.reduce(v))

    def __eq__(self, other):
        return (isinstance(other, Subspace) and self.field == other.field
                and self.ambient_dim == other.ambient_dim
                and np.array_equal(self.rows, other.rows))

    def __repr__(self):
        return f"Subspace(dim {self.dim} of F^{self.ambient_dim})"


# ---------------------------------------------------------------------------
# Representations.
# ---------------------------------------------------------------------------

def _label_key(label):
    return label.key if isinstance(label, SympElement) else label


class Representation:
    """A generating set with one invertible F-matrix per generator.

    Labels are the group elements (or abstract symbols) the matrices stand
    for; two representations are comparable when their label sequences agree.
    An optional relation set (pairs of words that coincide in the group) can
    be attached and is checked at construction.
    """

    def __init__(self, field: FieldDescriptor, labels, matrices,
                 relations=None):
        self.field = field
        self.labels = tuple(labels)
        self.matrices = [np.asarray(m, dtype=np.int64) for m in matrices]
        if len(self.labels) != len(self.matrices):
            raise ValueError("one matrix per generator label required")
        if not self.matrices:
            raise ValueError("a representation needs at least one generator")
        self.dim = self.matrices[0].shape[0]
        for m in self.matrices:
            if m.shape != (self.dim, self.dim):
                raise ValueError("generator matrices must be square, same size")
            if f_det(field, m) == 0:
                raise ValueError("generator matrix is singular")
        self.relations = relations or []
        for w1, w2 in self.relations:
            if not np.array_equal(self.word_matrix(w1), self.word_matrix(w2)):
                raise ValueError(f"relation {w1} = {w2} fails on the matrices")

    def word_matrix(self, word) -> np.ndarray:
        out = f_identity(self.field, self.dim)
        for gi in word:
            out = f_matmul(self.field, out, self.matrices[gi])
        return out

    def same_labels(self, other: "Representation") -> bool:
        return len(self.labels) == len(other.labels) and all(
            _label_key(a) == _label_key(b)
            for a, b in zip(self.labels, other.labels))

    def __repr__(self):
        return f"Representation(dim {self.dim}, {len(self.labels)} generators)"


def trivial_representation(field: FieldDescriptor, labels) -> Representation:
    one = np.ones((1, 1), dtype=np.int64)
    return Representation(field, labels, [one.copy() for _ in labels])


def direct_sum(rep1: Representation, rep2: Representation) -> Representation:
    if not rep1.same_labels(rep2):
        raise ValueError("generator label mismatch")
    mats = []
    for a, b in zip(rep1.matrices, rep2.matrices):
        m = np.zeros((rep1.dim + rep2.dim,) * 2, dtype=np.int64)
        m[:rep1.dim, :rep1.dim] = a
        m[rep1.dim:, rep1.dim:] = b
        mats.append(m)
    return Representation(rep1.field, rep1.labels, mats)


def spin(rep: Representation, seeds) -> Subspace:
    """Smallest subspace containing the seeds and closed under all generators."""
    f = rep.field
    seeds = [np.asarray(s, dtype=np.int64) for s in seeds]
    for s in seeds:
        if s.shape != (rep.dim,):
            raise ValueError("seed dimension mismatch")
    space = Subspace(f, rep.dim, np.array(seeds) if seeds else None)
    worklist = [space.rows[i] for i in range(space.dim)]
    while worklist:
        v = worklist.pop()
        for m in rep.matrices:
            w = space.reduce(f_matvec(f, m, v))
            if np.any(w):
                space = Subspace(f, rep.dim,
                                 np.concatenate([space.rows, w.reshape(1, -1)]))
                worklist.append(w)
                if space.dim == rep.dim:
                    return space
    return space


def irreducible_exhaustive(rep: Representation, cap: int = 10 ** 7) -> bool:
    """Complete decision: spin from every nonzero vector reaches everything.

    Spinning is scalar-invariant, so one seed per projective line suffices.
    """
    f = rep.field
    if f.size ** rep.dim > cap:
        raise CapExceeded(
            f"|F|^dim = {f.size ** rep.dim} exceeds the exhaustiveness cap {cap}")
    d = rep.dim
    for lead in range(d):
        # seeds with first nonzero coordinate at `lead`, normalized to 1
        tail = d - lead - 1
        for rest in range(f.size ** tail):
            v = np.zeros(d, dtype=np.int64)
            v[lead] = 1
            r = rest
            for k in range(tail):
                v[lead + 1 + k] = r % f.size
                r //= f.size
            if spin(rep, [v]).dim != d:
                return False
    return True


def commutant_dimension(rep: Representation) -> int:
    """Dimension of {C : C g = g C for every generator matrix g}."""
    f, d = rep.field, rep.dim
    rows = []
    for g in rep.matrices:
        for i in range(d):
            for j in range(d):
                row = np.zeros(d * d, dtype=np.int64)
                for k in range(d):
                    row[i * d + k] = f.add(int(row[i * d + k]), int(g[k, j]))
                for k in range(d):
                    row[k * d + j] = f.sub(int(row[k * d + j]), int(g[i, k]))
                rows.append(row)
    return f_nullspace(f, np.array(rows)).shape[0]


def intertwiner_space(rep1: Representation, rep2: Representation
                      ) -> list[np.ndarray]:
    """Basis of {T : T rho1(g) = rho2(g) T per generator}, as matrices
    mapping rep1's space into rep2's."""
    if not rep1.same_labels(rep2):
        raise ValueError("generator label mismatch")
    f = rep1.field
    d1, d2 = rep1.dim, rep2.dim
    rows = []
    for g1, g2 in zip(rep1.matrices, rep2.matrices):
        for i in range(d2):
            for j in range(d1):
                row = np.zeros(d2 * d1, dtype=np.int64)
                for k in range(d1):
                    row[i * d1 + k] = f.add(int(row[i * d1 + k]), int(g1[k, j]))
                for k in range(d2):
                    row[k * d1 + j] = f.sub(int(row[k * d1 + j]), int(g2[i, k]))
                rows.append(row)
    basis = f_nullspace(f, np.array(rows))
    return [basis[k].reshape(d2, d1) for k in range(basis.shape[0])]


def _has_invertible_combination(f: FieldDescriptor, basis: list[np.ndarray],
                                rng: random.Random | None,
                                exhaustive_limit: int = 2 ** 16,
                                samples: int = 500) -> bool:
    k = len(basis)
    if k == 0:
        return False
    if f.size ** k <= exhaustive_limit:
        for idx in range(1, f.size ** k):
            combo = np.zeros_like(basis[0])
            r = idx
            for t in range(k):
                c = r % f.size
                r //= f.size
                if c:
                    combo = f.vadd(combo, f.vscale(basis[t], c))
            if f_det(f, combo) != 0:
                return True
        return False
    rng = rng or random.Random(0)
    for _ in range(samples):
        combo = np.zeros_like(basis[0])
        for t in range(k):
            c = rng.randrange(f.size)
            if c:
                combo = f.vadd(combo, f.vscale(basis[t], c))
        if f_det(f, combo) != 0:
            return True
    return False


def is_isomorphic(rep1: Representation, rep2: Representation,
                  both_irreducible: bool = False,
                  rng: random.Random | None = None) -> bool:
    """Module isomorphism over the common generator labels.

    For certified irreducibles any nonzero intertwiner is invertible; in
    general an invertible element of the intertwiner space is searched
    (exhaustively when the space is small).
    """
    if rep1.dim != rep2.dim:
        return False
    basis = intertwiner_space(rep1, rep2)
    if both_irreducible:
        return len(basis) > 0
    return _has_invertible_combination(rep1.field, basis, rng)


def quotient_representation(rep: Representation, sub: Subspace
                            ) -> Representation:
    """The induced action on F^d / sub, in the coordinates of the standard
    basis vectors away from the subspace's pivot columns."""
    f, d = rep.field, rep.dim
    comp_cols = [c for c in range(d) if c not in sub.pivots]
    basis = np.zeros((d, d), dtype=np.int64)
    basis[:sub.dim] = sub.rows
    for k, c in enumerate(comp_cols):
        basis[sub.dim + k, c] = 1
    basis_t = basis.T.copy()
    mats = []
    for g in rep.matrices:
        cols = []
        for c in comp_cols:
            img = g[:, c].copy()
            coeffs = f_solve(f, basis_t, img)
            assert coeffs is not None
            cols.append(coeffs[sub.dim:])
        mats.append(np.stack(cols, axis=1))
    for g, m in zip(rep.matrices, mats):
        # sanity: the subspace must be invariant for the quotient to exist
        for r in range(sub.dim):
            img = f_matvec(f, g, sub.rows[r])
            if not sub.contains(img):
                raise ValueError("subspace is not invariant under the action")
    return Representation(f, rep.labels, mats)


def fixed_subspace(rep: Representation) -> Subspace:
    """Common 1-eigenspace of all generator matrices."""
    f, d = rep.field, rep.dim
    stacked = np.concatenate(
        [f.vadd(m, f.vneg(f_identity(f, d))) for m in rep.matrices])
    return Subspace(f, d, f_nullspace(f, stacked))


def certify_word_consistency(rep: Representation, rng: random.Random,
                             target_pairs: int = 200,
                             max_steps: int = 200_000) -> tuple[int, bool]:
    """Random-walk single-valuedness certificate.

    Walk the Cayley graph of the generator labels (which must be group
    elements), remembering the matrix of the walked word per group element;
    every revisit compares two distinct words with the same product.  Returns
    (pairs compared, all equal).
    """
    if not all(isinstance(l, SympElement) for l in rep.labels):
        raise ValueError("word certificate needs group-element labels")
    f = rep.field
    seen: dict[int, np.ndarray] = {}
    g = rep.labels[0].space.identity
    m = f_identity(f, rep.dim)
    seen[g.key] = m
    pairs = 0
    for _ in range(max_steps):
        if pairs >= target_pairs:
            break
        gi = rng.randrange(len(rep.labels))
        g = g * rep.labels[gi]
        m = f_matmul(f, m, rep.matrices[gi])
        prev = seen.get(g.key)
        if prev is None:
            seen[g.key] = m
        else:
            pairs += 1
            if not np.array_equal(prev, m):
                return pairs, False
    return pairs, True
