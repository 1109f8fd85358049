"""Exact integer lattice linear algebra.

Matrices are numpy arrays of ``dtype=object`` holding Python ints (or
``Fraction`` where stated), so every operation is exact.  Lattices are
always described by *rows*: a matrix ``B`` stands for the Z-span of its
rows.

The workhorse is :func:`snf`, a Smith normal form with all four unimodular
transforms tracked; kernels, saturations, cokernels, rational solves and
inverses are all read off from it.
"""

from dataclasses import dataclass
from fractions import Fraction
from math import gcd, lcm

import numpy as np

from .errors import LatticeError

_INT64_SAFE = 2**62


def intmat(A, shape=None):
    """Coerce ``A`` to a 2-D object array of Python ints."""
    if isinstance(A, np.ndarray) and A.dtype == object and A.ndim == 2:
        out = A.copy()
    else:
        arr = np.array(A, dtype=object)
        if arr.ndim == 1 and arr.size == 0:
            arr = arr.reshape(0, 0 if shape is None else shape[1])
        out = arr
    if out.ndim != 2:
        raise LatticeError(f"expected a 2-D matrix, got shape {out.shape}")
    flat = out.reshape(-1)
    for k, v in enumerate(flat):
        if isinstance(v, Fraction):
            if v.denominator != 1:
                raise LatticeError(f"non-integral entry {v}")
            flat[k] = v.numerator
        else:
            flat[k] = int(v)
    return flat.reshape(out.shape)


def zeros(m, n):
    return np.zeros((m, n), dtype=np.int64).astype(object)


def identity(n):
    return np.eye(n, dtype=np.int64).astype(object)


def _maxabs(A):
    if A.size == 0:
        return 0
    return max(abs(int(x)) for x in A.reshape(-1))


def _is_int_array(A):
    return A.dtype != object or all(type(x) is int for x in A.reshape(-1))


def matmul(A, B):
    """Exact matrix product.

    Integer products whose entries provably fit in int64 are delegated to
    numpy's native kernels; everything else runs on Python objects.
    """
    A = np.asarray(A)
    B = np.asarray(B)
    if A.dtype != object and B.dtype != object:
        A = A.astype(object)
        B = B.astype(object)
    if A.ndim == 2 and B.ndim == 2 and _is_int_array(A) and _is_int_array(B):
        inner = A.shape[1]
        bound = _maxabs(A) * _maxabs(B) * max(inner, 1)
        if bound < _INT64_SAFE:
            out = A.astype(np.int64) @ B.astype(np.int64)
            return out.astype(object)
    return np.dot(A, B)


def common_denominator(A):
    den = 1
    for x in np.asarray(A, dtype=object).reshape(-1):
        if isinstance(x, Fraction):
            den = lcm(den, x.denominator)
    return den


def to_fractions(A):
    A = np.asarray(A, dtype=object)
    return np.vectorize(Fraction, otypes=[object])(A) if A.size else A.copy()


def is_integral(A):
    return all(not isinstance(x, Fraction) or x.denominator == 1
               for x in np.asarray(A, dtype=object).reshape(-1))


@dataclass(eq=False)
class SnfDecomposition:
    """``U @ A @ V == D`` with ``U``, ``V`` unimodular.

    ``Uinv`` and ``Vinv`` are the exact inverses; ``rank`` counts nonzero
    diagonal entries, which form a divisibility chain.
    """

    U: np.ndarray
    D: np.ndarray
    V: np.ndarray
    Uinv: np.ndarray
    Vinv: np.ndarray
    rank: int

    @property
    def divisors(self):
        return [int(self.D[i, i]) for i in range(self.rank)]


def _round_quot(a, p):
    q = a // p
    r = a - q * p
    if 2 * abs(r) > abs(p):
        q += 1
    return q


def snf(A, transforms=True):
    """Smith normal form of an integer matrix.

    Pivoting takes the entry of least absolute value and clears its row and
    column with nearest-integer quotients; a non-divisible entry further down
    is folded into the pivot row.  With ``transforms=False`` only ``D`` is
    meaningful (the transforms are returned as ``None``).
    """
    A = intmat(A)
    m, n = A.shape
    M = [list(row) for row in A]
    if transforms:
        U = [[int(i == j) for j in range(m)] for i in range(m)]
        Ui = [[int(i == j) for j in range(m)] for i in range(m)]
        V = [[int(i == j) for j in range(n)] for i in range(n)]
        Vi = [[int(i == j) for j in range(n)] for i in range(n)]

    def row_addmul(i, j, c):
        # row_i += c * row_j
        Mi, Mj = M[i], M[j]
        for k in range(n):
            if Mj[k]:
                Mi[k] += c * Mj[k]
        if transforms:
            Ui_, Uj_ = U[i], U[j]
            for k in range(m):
                if Uj_[k]:
                    Ui_[k] += c * Uj_[k]
            for row in Ui:
                if row[i]:
                    row[j] -= c * row[i]

    def row_swap(i, j):
        M[i], M[j] = M[j], M[i]
        if transforms:
            U[i], U[j] = U[j], U[i]
            for row in Ui:
                row[i], row[j] = row[j], row[i]

    def row_neg(i):
        M[i] = [-x for x in M[i]]
        if transforms:
            U[i] = [-x for x in U[i]]
            for row in Ui:
                row[i] = -row[i]

    def col_addmul(i, j, c):
        # col_i += c * col_j
        for row in M:
            if row[j]:
                row[i] += c * row[j]
        if transforms:
            for row in V:
                if row[j]:
                    row[i] += c * row[j]
            Vi_i, Vi_j = Vi[i], Vi[j]
            for k in range(n):
                if Vi_i[k]:
                    Vi_j[k] -= c * Vi_i[k]

    def col_swap(i, j):
        for row in M:
            row[i], row[j] = row[j], row[i]
        if transforms:
            for row in V:
                row[i], row[j] = row[j], row[i]
            Vi[i], Vi[j] = Vi[j], Vi[i]

    t = 0
    while t < min(m, n):
        best = None
        for i in range(t, m):
            row = M[i]
            for j in range(t, n):
                v = row[j]
                if v and (best is None or abs(v) < best[0]):
                    best = (abs(v), i, j)
                    if best[0] == 1:
                        break
            if best is not None and best[0] == 1:
                break
        if best is None:
            break
        _, bi, bj = best
        if bi != t:
            row_swap(t, bi)
        if bj != t:
            col_swap(t, bj)
        while True:
            p = M[t][t]
            dirty = False
            for i in range(t + 1, m):
                if M[i][t]:
                    row_addmul(i, t, -_round_quot(M[i][t], p))
                    dirty = dirty or M[i][t] != 0
            for j in range(t + 1, n):
                if M[t][j]:
                    col_addmul(j, t, -_round_quot(M[t][j], p))
                    dirty = dirty or M[t][j] != 0
            if dirty:
                cand = [(abs(M[i][t]), i, t) for i in range(t, m) if M[i][t]]
                cand += [(abs(M[t][j]), t, j) for j in range(t, n) if M[t][j]]
                _, bi, bj = min(cand)
                if bi != t:
                    row_swap(t, bi)
                if bj != t:
                    col_swap(t, bj)
                continue
            bad = None
            for i in range(t + 1, m):
                row = M[i]
                for j in range(t + 1, n):
                    if row[j] % p:
                        bad = i
                        break
                if bad is not None:
                    break
            if bad is None:
                break
            row_addmul(t, bad, 1)
        if M[t][t] < 0:
            row_neg(t)
        t += 1

    D = np.array(M, dtype=object).reshape(m, n)
    if not transforms:
        return SnfDecomposition(None, D, None, None, None, t)

    def arr(L, k):
        return np.array(L, dtype=object).reshape(k, k)

    return SnfDecomposition(arr(U, m), D, arr(V, n), arr(Ui, m), arr(Vi, n), t)


def elementary_divisors(A):
    return snf(A, transforms=False).divisors


def det(A):
    """Determinant of a square integer matrix (Bareiss elimination)."""
    A = intmat(A)
    n = A.shape[0]
    if A.shape != (n, n):
        raise LatticeError("determinant of a non-square matrix")
    if n == 0:
        return 1
    M = [list(r) for r in A]
    sign, prev = 1, 1
    for k in range(n - 1):
        if M[k][k] == 0:
            for i in range(k + 1, n):
                if M[i][k]:
                    M[k], M[i] = M[i], M[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                M[i][j] = (M[i][j] * M[k][k] - M[i][k] * M[k][j]) // prev
        prev = M[k][k]
    return sign * M[n - 1][n - 1]


def hnf(B):
    """Row-style Hermite normal form of the lattice spanned by the rows of B.

    Returns only the nonzero rows: an echelon basis with positive pivots and
    entries above each pivot reduced into ``[0, pivot)``.  Two integer
    matrices span the same lattice iff their HNFs are equal.
    """
    B = intmat(B)
    m, n = B.shape
    M = [list(r) for r in B]
    r = 0
    for c in range(n):
        if r == m:
            break
        while True:
            nz = [i for i in range(r, m) if M[i][c]]
            if not nz:
                break
            piv = min(nz, key=lambda i: abs(M[i][c]))
            M[r], M[piv] = M[piv], M[r]
            p = M[r][c]
            done = True
            for i in range(r + 1, m):
                if M[i][c]:
                    q = _round_quot(M[i][c], p)
                    Mr = M[r]
                    M[i] = [a - q * b for a, b in zip(M[i], Mr)]
                    done = done and M[i][c] == 0
            if done:
                break
        if M[r][c] == 0:
            continue
        if M[r][c] < 0:
            M[r] = [-x for x in M[r]]
        p = M[r][c]
        for i in range(r):
            q = M[i][c] // p
            if q:
                M[i] = [a - q * b for a, b in zip(M[i], M[r])]
        r += 1
    return np.array(M[:r], dtype=object).reshape(r, n)


def kernel(A):
    """Integer basis (as rows) of ``{x in Z^n : A x = 0}``."""
    A = intmat(A)
    dec = snf(A)
    return dec.V[:, dec.rank:].T.copy()


def left_kernel(A):
    """Integer basis (as rows) of ``{y in Z^m : y A = 0}``."""
    return kernel(intmat(A).T)


def saturate(B):
    """Basis (HNF rows) of ``span_Q(rows of B)`` intersected with Z^n."""
    B = intmat(B)
    if B.shape[0] == 0:
        return B
    dec = snf(B)
    return hnf(dec.Vinv[:dec.rank])


def is_saturated(B):
    return all(d == 1 for d in elementary_divisors(B))


def rank(A):
    return snf(A, transforms=False).rank


@dataclass(frozen=True)
class FiniteAbelianGroup:
    """Finite abelian group by invariant factors d_1 | d_2 | ... (all > 1)."""

    invariants: tuple = ()

    def __post_init__(self):
        inv = self.invariants
        for a, b in zip(inv, inv[1:]):
            if b % a:
                raise LatticeError(f"invariants {inv} do not form a divisibility chain")
        if any(d <= 1 for d in inv):
            raise LatticeError(f"invariants must exceed 1, got {inv}")

    @classmethod
    def from_orders(cls, orders):
        """Group ``⊕ Z/n_i`` for arbitrary cyclic orders (1s allowed)."""
        orders = [abs(int(x)) for x in orders]
        if any(x == 0 for x in orders):
            raise LatticeError("Z/0 is not finite")
        if not orders:
            return cls(())
        divs = snf(np.diag(np.array(orders, dtype=object)), transforms=False).divisors
        return cls(tuple(d for d in divs if d > 1))

    @classmethod
    def cyclic_power(cls, n, k):
        return cls(tuple([n] * k) if n > 1 else ())

    @property
    def order(self):
        out = 1
        for d in self.invariants:
            out *= d
        return out

    @property
    def exponent(self):
        return self.invariants[-1] if self.invariants else 1

    @property
    def is_trivial(self):
        return not self.invariants

    def __str__(self):
        if not self.invariants:
            return "0"
        parts = []
        for d in sorted(set(self.invariants)):
            k = self.invariants.count(d)
            parts.append(f"(Z/{d})^{k}" if k > 1 else f"Z/{d}")
        return " + ".join(parts)


def cokernel_structure(A, ncols=None):
    """Structure of ``Z^ncols / rowspan(A)``: (torsion group, free rank)."""
    A = np.asarray(A, dtype=object)
    if A.size == 0:
        n = A.shape[1] if A.ndim == 2 else (ncols or 0)
        return FiniteAbelianGroup(()), n
    A = intmat(A)
    divs = elementary_divisors(A)
    return (FiniteAbelianGroup(tuple(d for d in divs if d > 1)),
            A.shape[1] - len(divs))


def _as_fractions(N, den):
    if den == 1:
        return N
    return np.vectorize(lambda v: Fraction(v, den), otypes=[object])(N)


def solve_rows_scaled(B, X):
    """Integer ``N`` and ``den`` with ``(N / den) @ B == X``.

    B need not be square; if it has dependent rows the solution with zero
    weight on the redundant SNF directions is returned.  Raises if X is not
    in the rational row space of B.
    """
    B = intmat(B)
    X = np.asarray(X, dtype=object)
    if X.ndim == 1:
        X = X.reshape(1, -1)
    xden = common_denominator(X)
    Xi = intmat(X * xden) if xden != 1 else intmat(X)
    dec = snf(B)
    Z = matmul(Xi, dec.V)
    r = dec.rank
    if r < Z.shape[1] and Z[:, r:].any():
        raise LatticeError("right-hand side is not in the row space")
    L = dec.D[r - 1, r - 1] if r else 1
    W = zeros(Z.shape[0], B.shape[0])
    for i in range(r):
        W[:, i] = Z[:, i] * (L // dec.D[i, i])
    N = matmul(W, dec.U)
    den = L * xden
    g = 0
    for v in N.reshape(-1):
        g = gcd(g, int(v))
        if g == 1:
            break
    g = gcd(g, den)
    if g > 1:
        N = N // g
        den //= g
    return N, den


def solve_rows(B, X):
    """Rational ``Y`` (Fractions unless integral) with ``Y @ B == X``."""
    N, den = solve_rows_scaled(B, X)
    return _as_fractions(N, den)


def solve_rows_int(B, X):
    N, den = solve_rows_scaled(B, X)
    if den != 1:
        raise LatticeError("solution is not integral")
    return N


def inverse_scaled(A):
    """Integer ``N`` and ``den`` with ``A^{-1} == N / den``."""
    A = intmat(A)
    n = A.shape[0]
    if A.shape != (n, n):
        raise LatticeError("inverse of a non-square matrix")
    dec = snf(A)
    if dec.rank != n:
        raise LatticeError("matrix is singular")
    L = dec.D[n - 1, n - 1] if n else 1
    scaled = dec.V * np.array([L // dec.D[i, i] for i in range(n)], dtype=object)[None, :]
    return matmul(scaled, dec.U), L


def inverse(A):
    """Exact inverse of a nonsingular square integer matrix."""
    N, den = inverse_scaled(A)
    return _as_fractions(N, den)


def unimodular_inverse(A):
    N, den = inverse_scaled(A)
    if den != 1:
        raise LatticeError("matrix is not unimodular")
    return N


def lattice_basis(rows):
    """HNF basis of the (possibly rational) lattice spanned by ``rows``.

    Returns ``(H, den)``; the lattice is spanned by the rows of ``H / den``.
    """
    rows = np.asarray(rows, dtype=object)
    den = common_denominator(rows)
    return hnf(intmat(rows * den)), den


def lattice_equal(R1, R2):
    H1, d1 = lattice_basis(R1)
    H2, d2 = lattice_basis(R2)
    L = lcm(d1, d2)
    return np.array_equal(hnf(H1 * (L // d1)), hnf(H2 * (L // d2)))


def quotient_group(sup_rows, sub_rows):
    """``sup / sub`` for rational lattices with sub contained in sup.

    Returns (torsion group, free rank).  Raises if sub is not contained in
    sup.
    """
    Hs, ds = lattice_basis(sup_rows)
    Hb, db = lattice_basis(sub_rows)
    L = lcm(ds, db)
    Hs = Hs * (L // ds)
    Hb = Hb * (L // db)
    X = solve_rows_int(Hs, Hb)
    grp, free = cokernel_structure(X, ncols=Hs.shape[0])
    if X.shape[0] == 0:
        free = Hs.shape[0]
    return grp, free


def overlattice_quotient(gens, r):
    """``(Z^r + span(gens)) / Z^r`` for rational generator rows."""
    gens = np.asarray(gens, dtype=object).reshape(-1, r)
    return quotient_group(np.vstack([identity(r), gens]), identity(r))[0]


def content(v):
    g = 0
    for x in v:
        g = gcd(g, int(x))
    return g
