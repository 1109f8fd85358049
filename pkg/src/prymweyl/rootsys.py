"""Cartan data and representation invariants for simple root systems.

Simple roots follow Bourbaki numbering.  Weights are tuples of coordinates
in the fundamental-weight basis, so ``x[i]`` is the coroot pairing
``<x, alpha_i^vee>``.  The Cartan matrix satisfies
``cartan[i][j] = <alpha_i, alpha_j^vee>``; its i-th row is therefore the
simple root alpha_i in fundamental-weight coordinates.

The invariant form is normalized so long roots have squared length 2.
Everything is exact (ints and ``Fraction``).
"""

from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache
from math import factorial, gcd, lcm

from .errors import BoundExceeded, RootSystemError

FAMILIES = "ABCDEFG"
LATTICES = ("root", "weight")


def _valid(family, rank):
    return ((family == "A" and rank >= 1)
            or (family == "B" and rank >= 2)
            or (family == "C" and rank >= 3)
            or (family == "D" and rank >= 4)
            or (family == "E" and rank in (6, 7, 8))
            or (family == "F" and rank == 4)
            or (family == "G" and rank == 2))


def _simple_gram(family, n):
    """Gram matrix of the simple roots, 0-based, long roots of length 2."""
    h = Fraction(1, 2)
    lengths = [Fraction(2)] * n
    bonds = {}
    if family in "ABC":
        for i in range(n - 1):
            bonds[i, i + 1] = -1
        if family == "B":
            lengths[n - 1] = Fraction(1)
        elif family == "C":
            lengths = [Fraction(1)] * (n - 1) + [Fraction(2)]
            for i in range(n - 2):
                bonds[i, i + 1] = -h
    elif family == "D":
        for i in range(n - 2):
            bonds[i, i + 1] = -1
        bonds[n - 3, n - 1] = -1
    elif family == "E":
        chain = [0, 2, 3, 4, 5, 6, 7][: n - 1]
        for a, b in zip(chain, chain[1:]):
            bonds[a, b] = -1
        bonds[1, 3] = -1
    elif family == "F":
        lengths = [Fraction(2), Fraction(2), Fraction(1), Fraction(1)]
        bonds = {(0, 1): -1, (1, 2): -1, (2, 3): -h}
    elif family == "G":
        lengths = [Fraction(2, 3), Fraction(2)]
        bonds = {(0, 1): -1}
    B = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        B[i][i] = lengths[i]
    for (i, j), v in bonds.items():
        B[i][j] = B[j][i] = Fraction(v)
    return B


def _weyl_order_closed_form(family, n):
    if family == "A":
        return factorial(n + 1)
    if family in "BC":
        return 2**n * factorial(n)
    if family == "D":
        return 2 ** (n - 1) * factorial(n)
    return {("E", 6): 51840, ("E", 7): 2903040, ("E", 8): 696729600,
            ("F", 4): 1152, ("G", 2): 12}[family, n]


def _rat_inverse(M):
    n = len(M)
    A = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)]
         for i, row in enumerate(M)]
    for c in range(n):
        p = next(r for r in range(c, n) if A[r][c] != 0)
        A[c], A[p] = A[p], A[c]
        pv = A[c][c]
        A[c] = [x / pv for x in A[c]]
        for r in range(n):
            if r != c and A[r][c] != 0:
                f = A[r][c]
                A[r] = [x - f * y for x, y in zip(A[r], A[c])]
    return tuple(tuple(row[n:]) for row in A)


@dataclass(frozen=True)
class RootDatum:
    """Immutable Cartan data of a simple type."""

    family: str
    rank: int
    cartan: tuple
    root_lengths: tuple
    positive_roots_alpha: tuple
    weyl_order: int

    @property
    def name(self):
        return f"{self.family}{self.rank}"

    @property
    def simple_roots(self):
        return self.cartan

    @property
    def fundamental_weights(self):
        n = self.rank
        return tuple(tuple(int(i == j) for j in range(n)) for i in range(n))

    @property
    def rho(self):
        return (1,) * self.rank

    @property
    def n_positive(self):
        return len(self.positive_roots_alpha)

    @property
    def lie_dim(self):
        return self.rank + 2 * self.n_positive

    @cached_property
    def cartan_inverse(self):
        return _rat_inverse(self.cartan)

    @cached_property
    def weight_gram(self):
        """Gram matrix of the fundamental weights."""
        Ci = self.cartan_inverse
        half = [ell / 2 for ell in self.root_lengths]
        return tuple(tuple(Ci[i][j] * half[j] for j in range(self.rank))
                     for i in range(self.rank))

    @cached_property
    def positive_roots(self):
        """Positive roots in fundamental-weight coordinates."""
        return tuple(self.alpha_to_weight(b) for b in self.positive_roots_alpha)

    def alpha_to_weight(self, beta):
        n, C = self.rank, self.cartan
        return tuple(sum(beta[i] * C[i][j] for i in range(n)) for j in range(n))

    def weight_to_alpha(self, x):
        """Root-basis coordinates (exact rationals) of a weight."""
        n, Ci = self.rank, self.cartan_inverse
        return tuple(sum(Fraction(x[i]) * Ci[i][j] for i in range(n)) for j in range(n))

    def reflect(self, x, i):
        """Simple reflection s_i applied to a weight."""
        a = self.cartan[i]
        c = x[i]
        return tuple(xk - c * ak for xk, ak in zip(x, a))

    def reflection_matrix(self, i):
        """Matrix R with ``x @ R == reflect(x, i)`` for row vectors x."""
        n = self.rank
        a = self.cartan[i]
        return [[int(k == j) - (a[j] if k == i else 0) for j in range(n)]
                for k in range(n)]

    def dominant_conjugate(self, x):
        x = tuple(x)
        while True:
            i = next((k for k, v in enumerate(x) if v < 0), None)
            if i is None:
                return x
            x = self.reflect(x, i)


def _positive_roots(cartan):
    n = len(cartan)
    simple = [tuple(int(i == j) for j in range(n)) for i in range(n)]
    seen = set(simple)
    queue = deque(simple)
    while queue:
        beta = queue.popleft()
        x = [sum(beta[i] * cartan[i][j] for i in range(n)) for j in range(n)]
        for i in range(n):
            if x[i] == 0 or beta == simple[i]:
                continue
            new = tuple(b - (x[i] if k == i else 0) for k, b in enumerate(beta))
            if all(c >= 0 for c in new) and new not in seen:
                seen.add(new)
                queue.append(new)
    return tuple(sorted(seen, key=lambda b: (sum(b), b)))


@lru_cache(maxsize=None)
def build_root_datum(family, rank):
    """Cartan data for the simple type ``family``-``rank``."""
    family = str(family).upper()
    try:
        rank = int(rank)
    except (TypeError, ValueError):
        raise RootSystemError(f"rank must be an integer, got {rank!r}") from None
    if family not in FAMILIES or not _valid(family, rank):
        raise RootSystemError(f"invalid simple type {family}{rank}")
    B = _simple_gram(family, rank)
    cartan = tuple(tuple(int(2 * B[i][j] / B[j][j]) for j in range(rank))
                   for i in range(rank))
    roots = _positive_roots(cartan)
    return RootDatum(family, rank, cartan, tuple(B[i][i] for i in range(rank)),
                     roots, _weyl_order_closed_form(family, rank))


def fundamental_weight(rd, i):
    """The fundamental weight with 1-based Bourbaki index ``i``."""
    if not 1 <= i <= rd.rank:
        raise RootSystemError(f"weight index {i} out of range for {rd.name}")
    return tuple(int(j == i - 1) for j in range(rd.rank))


def _check_dim(rd, *vs):
    for v in vs:
        if len(v) != rd.rank:
            raise RootSystemError(f"vector of length {len(v)} for rank {rd.rank}")


def inner(rd, x, y):
    """Normalized invariant form of two weights."""
    _check_dim(rd, x, y)
    G = rd.weight_gram
    n = rd.rank
    return sum((Fraction(x[i]) * G[i][j] * y[j] for i in range(n) for j in range(n)
                if x[i] and y[j]), Fraction(0))


def check_dominant(rd, lam):
    _check_dim(rd, lam)
    for v in lam:
        if Fraction(v).denominator != 1 or v < 0:
            raise RootSystemError(f"{tuple(lam)} is not dominant integral")
    return tuple(int(v) for v in lam)


@dataclass(frozen=True)
class IntegralForm:
    """Negative definite form ``-scale * inner`` making ``lam`` integral.

    ``lattice`` records which lattice the integrality was imposed against:
    the root lattice (pairings with simple roots) or the weight lattice
    (pairings with fundamental weights).
    """

    base: RootDatum
    scale: Fraction
    lattice: str = "root"

    def __call__(self, x, y):
        return -self.scale * inner(self.base, x, y)


def integral_form(rd, lam, lattice="root"):
    """Minimal rescaling of the invariant form that is integral on ``lam``."""
    if lattice not in LATTICES:
        raise RootSystemError(f"lattice must be one of {LATTICES}")
    lam = check_dominant(rd, lam)
    if lattice == "root":
        probes = rd.simple_roots
    else:
        probes = rd.fundamental_weights
    vals = [inner(rd, lam, p) for p in probes]
    num, den = 0, 1
    for v in vals:
        num = gcd(num, v.numerator)
        den = lcm(den, v.denominator)
    if num == 0:
        raise RootSystemError("the zero weight has no normalizing scale")
    return IntegralForm(rd, Fraction(den, num), lattice)


def weyl_dim(rd, lam):
    """Dimension of the irreducible representation with highest weight lam."""
    lam = check_dominant(rd, lam)
    lr = tuple(v + 1 for v in lam)
    num = den = Fraction(1)
    for a in rd.positive_roots:
        num *= inner(rd, lr, a)
        den *= inner(rd, rd.rho, a)
    out = num / den
    assert out.denominator == 1
    return int(out)


def dynkin_index(rd, lam):
    """``dim V * <lam, lam + 2 rho> / dim g`` with long roots of length 2."""
    lam = check_dominant(rd, lam)
    shifted = tuple(v + 2 for v in lam)
    return Fraction(weyl_dim(rd, lam)) * inner(rd, lam, shifted) / rd.lie_dim


def orbit_points(rd, x, bound=10**6):
    """Unordered W-orbit of a weight by breadth-first search."""
    x = tuple(x)
    seen = {x}
    queue = deque([x])
    while queue:
        y = queue.popleft()
        for i in range(rd.rank):
            if y[i]:
                z = rd.reflect(y, i)
                if z not in seen:
                    seen.add(z)
                    if len(seen) > bound:
                        raise BoundExceeded("W-orbit size", bound)
                    queue.append(z)
    return seen


@dataclass(frozen=True)
class WeightOrbit:
    representative: tuple
    points: tuple
    multiplicity: int

    @property
    def size(self):
        return len(self.points)


@dataclass(frozen=True)
class WeightSystem:
    """Weights of an irreducible representation grouped into W-orbits.

    Orbits are listed from the highest weight downward.
    """

    highest: tuple
    orbits: tuple
    total_dim: int

    @property
    def kind(self):
        """'minuscule', 'quasi-minuscule' or 'other'."""
        if len(self.orbits) == 1:
            return "minuscule"
        if (len(self.orbits) == 2 and self.orbits[1].size == 1
                and not any(self.orbits[1].representative)):
            return "quasi-minuscule"
        return "other"


def dominant_weights_below(rd, lam, bound=10**5):
    """Dominant weights ``mu`` with ``lam - mu`` a nonnegative root combination."""
    lam = check_dominant(rd, lam)
    lam_alpha = rd.weight_to_alpha(lam)
    found = {lam}
    queue = deque([lam])
    while queue:
        mu = queue.popleft()
        for a in rd.positive_roots:
            nu = tuple(m - c for m, c in zip(mu, a))
            if min(nu) < 0 or nu in found:
                continue
            diff = [p - q for p, q in zip(lam_alpha, rd.weight_to_alpha(nu))]
            if all(d >= 0 and d.denominator == 1 for d in diff):
                found.add(nu)
                if len(found) > bound:
                    raise BoundExceeded("number of dominant weights", bound)
                queue.append(nu)
    return found


def weight_system(rd, lam, bound=10**6):
    """Weight multiplicities by Freudenthal's recursion over dominant weights."""
    lam = check_dominant(rd, lam)
    dom = dominant_weights_below(rd, lam)
    lam_alpha = rd.weight_to_alpha(lam)

    def depth(mu):
        return sum(p - q for p, q in zip(lam_alpha, rd.weight_to_alpha(mu)))

    order = sorted(dom, key=lambda mu: (depth(mu), tuple(-v for v in mu)))
    rho = rd.rho
    lr = tuple(v + r for v, r in zip(lam, rho))
    c_lam = inner(rd, lr, lr)
    mult = {lam: 1}

    def m_of(nu):
        return mult.get(rd.dominant_conjugate(nu), 0)

    for mu in order[1:]:
        acc = Fraction(0)
        for a in rd.positive_roots:
            k = 1
            while True:
                nu = tuple(m + k * c for m, c in zip(mu, a))
                mn = m_of(nu)
                if mn == 0:
                    break
                acc += mn * inner(rd, nu, a)
                k += 1
        mr = tuple(v + r for v, r in zip(mu, rho))
        val = 2 * acc / (c_lam - inner(rd, mr, mr))
        assert val.denominator == 1
        mult[mu] = int(val)

    orbits = []
    total = 0
    budget = bound
    for mu in order:
        if mult[mu] == 0:
            continue
        pts = orbit_points(rd, mu, budget)
        budget -= len(pts)
        orbits.append(WeightOrbit(mu, tuple(sorted(pts, reverse=True)), mult[mu]))
        total += mult[mu] * len(pts)
    return WeightSystem(lam, tuple(orbits), total)


def height_exponents(rd):
    """Exponents of W read off from the partition of positive roots by height."""
    heights = [sum(b) for b in rd.positive_roots_alpha]
    top = max(heights)
    counts = [heights.count(h) for h in range(1, top + 1)]
    exps = []
    for h, c in enumerate(counts, start=1):
        nxt = counts[h] if h < len(counts) else 0
        exps += [h] * (c - nxt)
    return sorted(exps)


def closed_form_check(rd):
    """Weyl order recomputed as the product of (exponent + 1)."""
    out = 1
    for e in height_exponents(rd):
        out *= e + 1
    return out


def all_simple_types(max_rank):
    for fam in FAMILIES:
        for n in range(1, max_rank + 1):
            if _valid(fam, n):
                yield fam, n


__all__ = [
    "RootDatum", "IntegralForm", "WeightSystem", "WeightOrbit", "build_root_datum",
    "fundamental_weight", "inner", "integral_form", "weyl_dim", "dynkin_index",
    "weight_system", "orbit_points", "dominant_weights_below", "height_exponents",
    "closed_form_check", "all_simple_types", "check_dominant",
]
