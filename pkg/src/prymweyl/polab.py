"""Polarizations restricted to complementary sublattices.

An abelian variety is modelled by its period lattice ``Z^n2`` carrying an
integral nondegenerate alternating form ``E``; no complex structure is
represented.  Conventions:

* vectors are columns and ``E(x, y) = x^T E y``;
* an endomorphism ``u`` acts on columns, and is symmetric for ``E`` when
  ``u^T E == E u``;
* sublattices are given by matrices whose *rows* are a basis;
* finite subgroups of the torus ``Q^n2 / Z^n2`` are described by rational
  generators modulo the lattice.

For complementary subtori A, P cut out by ``u`` with ``u^2 = q u``, the
intersection A ∩ P is ``Z^n2 / (Λ_A ⊕ Λ_P)``.
"""

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from math import gcd, prod

import numpy as np

from . import intlat
from .checks import Check, Report
from .errors import LatticeError
from .intlat import FiniteAbelianGroup


def _rows(M):
    return intlat.intmat(M)


@dataclass(frozen=True, eq=False)
class PolarizedLattice:
    """Integral nondegenerate alternating form on ``Z^n2``."""

    E: np.ndarray

    def __post_init__(self):
        E = intlat.intmat(self.E)
        object.__setattr__(self, "E", E)
        n = E.shape[0]
        if E.shape != (n, n) or n % 2:
            raise LatticeError(f"form must be square of even size, got {E.shape}")
        if not (E.T == -E).all():
            raise LatticeError("form is not alternating")
        if intlat.rank(E) != n:
            raise LatticeError("form is degenerate")

    @property
    def n2(self):
        return self.E.shape[0]

    @cached_property
    def type(self):
        """Polarization type (d_1 | ... | d_n); every divisor of E occurs twice."""
        divs = intlat.elementary_divisors(self.E)
        return tuple(divs[::2])

    def restrict(self, B):
        """Gram matrix of the form on the sublattice with basis rows B."""
        B = _rows(B)
        return intlat.matmul(intlat.matmul(B, self.E), B.T)


def standard_form(n, types=None):
    """Block form with 2x2 blocks ``[[0, d], [-d, 0]]``; principal by default."""
    types = list(types) if types is not None else [1] * n
    E = intlat.zeros(2 * n, 2 * n)
    for k, d in enumerate(types):
        E[2 * k, 2 * k + 1] = d
        E[2 * k + 1, 2 * k] = -d
    return E


@dataclass(frozen=True)
class KGroup:
    """Kernel of the polarization: the group and rational generators."""

    group: FiniteAbelianGroup
    generators: np.ndarray


def k_group(pl):
    """``E^{-1} Z^n2 / Z^n2`` with generators the columns of ``E^{-1}``."""
    grp, _ = intlat.cokernel_structure(pl.E)
    return KGroup(grp, intlat.inverse(pl.E).T)


def form_type(G):
    """Polarization-type group of a (sub)lattice Gram matrix."""
    grp, free = intlat.cokernel_structure(G)
    if free:
        raise LatticeError("restricted form is degenerate")
    return grp


@dataclass(frozen=True, eq=False)
class SymEndomorphism:
    u: np.ndarray
    q: int

    def __post_init__(self):
        object.__setattr__(self, "u", intlat.intmat(self.u))
        if int(self.q) <= 0:
            raise LatticeError("q must be a positive integer")

    def complement(self):
        return SymEndomorphism(self.q * intlat.identity(self.u.shape[0]) - self.u, self.q)

    def violations(self, pl):
        out = []
        u, E = self.u, pl.E
        if not (intlat.matmul(u.T, E) == intlat.matmul(E, u)).all():
            out.append("not symmetric for the form")
        if not (intlat.matmul(u, u) == self.q * u).all():
            out.append(f"u^2 != {self.q} u")
        return out


def exponent_of(G):
    return form_type(G).exponent


def projector_endo(pl, B_A, q=None):
    """The symmetric endomorphism ``q * B^T E_A^{-1} B E`` attached to a sublattice.

    ``q`` defaults to the exponent of ``coker(E_A)``; a smaller value that
    leaves the result non-integral raises :class:`LatticeError`.
    """
    B = _rows(B_A)
    EA = pl.restrict(B)
    if intlat.rank(EA) != B.shape[0]:
        raise LatticeError("restricted form is degenerate")
    if q is None:
        q = exponent_of(EA)
    N, den = intlat.inverse_scaled(EA)
    U = q * intlat.matmul(intlat.matmul(B.T, N), intlat.matmul(B, pl.E))
    if any(v % den for v in U.reshape(-1)):
        raise LatticeError(f"q = {q} is smaller than the exponent of the sublattice")
    se = SymEndomorphism(U // den, int(q))
    bad = se.violations(pl)
    if bad:
        raise LatticeError("; ".join(bad))
    return se


@dataclass(frozen=True, eq=False)
class SubvarietyPair:
    """Data of the complementary pair (A, P) attached to ``u``."""

    pl: PolarizedLattice
    se: SymEndomorphism
    lattice_A: np.ndarray
    lattice_P: np.ndarray
    A_cap_P: FiniteAbelianGroup
    G_A: FiniteAbelianGroup
    G_P: FiniteAbelianGroup
    K_A: FiniteAbelianGroup
    K_P: FiniteAbelianGroup

    @property
    def rank_A(self):
        return self.lattice_A.shape[0]

    @property
    def rank_P(self):
        return self.lattice_P.shape[0]


def _sat_image(M):
    """Saturated lattice spanned by the columns of M."""
    M = _rows(M)
    if not M.any():
        return intlat.zeros(0, M.shape[0])
    return intlat.saturate(M.T)


def _quotient_order(sup, sub):
    if sup.shape[0] == 0:
        return FiniteAbelianGroup(())
    grp, free = intlat.quotient_group(sup, sub)
    if free:
        raise LatticeError("quotient is not finite")
    return grp


def decompose(pl, se):
    bad = se.violations(pl)
    if bad:
        raise LatticeError("; ".join(bad))
    n = pl.n2
    comp = se.complement()
    LA = _sat_image(se.u)
    LP = _sat_image(comp.u)
    if LA.shape[0] + LP.shape[0] != n:
        raise LatticeError("images of u and q - u are not complementary")
    acp = _quotient_order(intlat.identity(n), np.vstack([LA, LP]))
    G_P = _quotient_order(LA, se.u.T) if LA.shape[0] else FiniteAbelianGroup(())
    G_A = _quotient_order(LP, comp.u.T) if LP.shape[0] else FiniteAbelianGroup(())
    K_A = form_type(pl.restrict(LA)) if LA.shape[0] else FiniteAbelianGroup(())
    K_P = form_type(pl.restrict(LP)) if LP.shape[0] else FiniteAbelianGroup(())
    return SubvarietyPair(pl, se, LA, LP, acp, G_A, G_P, K_A, K_P)


def k_cap_order(pl, B):
    """Order of ``K(L) ∩ (span_Q B / Λ_B)`` for a saturated basis B.

    A rational combination ``B^T c`` lies in ``E^{-1} Z^n2`` iff
    ``E B^T c`` is integral, so the order is the product of the elementary
    divisors of ``E B^T``.
    """
    B = _rows(B)
    if B.shape[0] == 0:
        return 1
    return prod(intlat.elementary_divisors(intlat.matmul(pl.E, B.T)))


def projection_image_order(pl, LA, LP):
    """Order of the image of K(L) in the quotient torus S / A.

    Coordinates are taken in the basis ``LA ⊕ LP``; dropping the A
    coordinates realizes ``V / span(A)``.  The image of K(L) is
    ``[proj(E^{-1} Z^n2) : proj(Z^n2)]``.
    """
    kA = LA.shape[0]
    if LP.shape[0] == 0:
        return 1
    stack = np.vstack([LA, LP])
    Einv_rows = intlat.inverse(pl.E).T
    kl = intlat.solve_rows(stack, Einv_rows)[:, kA:]
    lam = intlat.solve_rows(stack, intlat.identity(pl.n2))[:, kA:]
    grp, free = intlat.quotient_group(np.vstack([kl, lam]), lam)
    if free:
        raise LatticeError("projection image is not finite")
    return grp.order


def intersection_generators(pair):
    """Rational generators of A ∩ P inside A: ``(u / q) e_k`` for basis vectors."""
    se = pair.se
    return np.array([[Fraction(int(v), se.q) for v in row] for row in se.u.T], dtype=object)


def verify_polarization_identities(pl, se, pair=None):
    """Group-order identities for the pair (A, P) inside K(L)."""
    pair = pair or decompose(pl, se)
    q = se.q
    kl = k_group(pl).group.order
    acp = pair.A_cap_P.order
    checks = []

    lhs = pair.K_A.order * pair.K_P.order
    checks.append(Check("k_orders_product", lhs == acp**2 * kl,
                        f"{lhs} vs {acp}^2 * {kl}"))

    ok, w = True, ""
    if pair.rank_A and pair.rank_P:
        for k, a in enumerate(intersection_generators(pair)):
            qa = [v * q for v in a]
            p = [Fraction(int(k == j)) - v for j, v in enumerate(a)]
            qp = [v * q for v in p]
            try:
                intlat.solve_rows_int(pair.lattice_A, [qa])
                intlat.solve_rows_int(pair.lattice_P, [qp])
            except LatticeError:
                ok, w = False, f"generator e_{k} not killed by {q}"
                break
    ok = ok and q % pair.A_cap_P.exponent == 0
    checks.append(Check("intersection_q_torsion", ok, w))

    rA, rP = pair.rank_A, pair.rank_P
    e1 = q**rA == acp * pair.G_P.order
    e2 = q**rP == acp * pair.G_A.order
    checks.append(Check("torsion_sequences", e1 and e2,
                        f"q^{rA}={q**rA} vs {acp}*{pair.G_P.order}; "
                        f"q^{rP}={q**rP} vs {acp}*{pair.G_A.order}"))

    kA = k_cap_order(pl, pair.lattice_A)
    kP = k_cap_order(pl, pair.lattice_P)
    checks.append(Check("k_intersections_product", kA * kP == kl, f"{kA}*{kP} vs {kl}"))

    checks.append(Check("k_restriction_sequences",
                        pair.K_A.order == acp * kA and pair.K_P.order == acp * kP,
                        f"|K_A|={pair.K_A.order}, |K_P|={pair.K_P.order}, "
                        f"|A∩P|={acp}, {kA}, {kP}"))

    piA = projection_image_order(pl, pair.lattice_A, pair.lattice_P)
    piP = projection_image_order(pl, pair.lattice_P, pair.lattice_A)
    checks.append(Check("projection_images", piA == kP and piP == kA,
                        f"|pi_A K|={piA} vs {kP}; |pi_P K|={piP} vs {kA}"))
    return Report(tuple(checks))


verify_section2 = verify_polarization_identities


@dataclass(frozen=True)
class InducedType:
    from_form: FiniteAbelianGroup
    from_image: FiniteAbelianGroup
    lattices_equal: bool

    @property
    def equal(self):
        return self.lattices_equal and self.from_form == self.from_image


def divisibility_witness(G, q):
    """First Gram entry not divisible by q, or None."""
    for (i, j), v in np.ndenumerate(G):
        if v % q:
            return i, j, v
    return None


def induced_type(pl, se, basis=None):
    """Type of ``E_A / q`` compared with the image of K(L) under u.

    Both are computed as overlattices of ``Z^rA`` in the coordinates of the
    saturated image basis and compared as lattices.
    """
    B = _rows(basis) if basis is not None else _sat_image(se.u)
    q = se.q
    EA = pl.restrict(B)
    bad = divisibility_witness(EA, q)
    if bad is not None:
        i, j, v = bad
        raise LatticeError(f"Gram entry ({i},{j}) = {v} is not divisible by {q}")
    r = B.shape[0]
    if r == 0:
        return InducedType(FiniteAbelianGroup(()), FiniteAbelianGroup(()), True)
    M = EA // q
    left_lat = intlat.inverse(M).T
    img = np.dot(intlat.inverse(pl.E).T, se.u.T.astype(object))
    coords = intlat.solve_rows(B, img)
    ident = intlat.identity(r)
    right_lat = np.vstack([ident, coords])
    left = form_type(M)
    right = intlat.overlattice_quotient(coords, r)
    same = intlat.lattice_equal(np.vstack([ident, left_lat]), right_lat)
    return InducedType(left, right, same)


def random_unimodular(rng, n, steps=None, coeff=2):
    """Product of random elementary matrices and signed permutations."""
    steps = steps if steps is not None else 3 * n
    M = intlat.identity(n)
    for _ in range(steps):
        i, j = rng.choice(n, size=2, replace=False) if n > 1 else (0, 0)
        if n > 1:
            c = int(rng.integers(-coeff, coeff + 1))
            M[i] = M[i] + c * M[j]
    perm = rng.permutation(n)
    M = M[perm]
    signs = rng.choice([-1, 1], size=n)
    return M * np.array([int(s) for s in signs], dtype=object)[:, None]


def conjugate(E, P):
    """Form in new coordinates ``x = P y``."""
    P = _rows(P)
    return intlat.matmul(intlat.matmul(P.T, _rows(E)), P)


def random_type(rng, n, max_step=3):
    d = 1
    out = []
    for _ in range(n):
        if rng.random() < 0.4:
            d *= int(rng.integers(2, max_step + 1))
        out.append(d)
    return out


@dataclass(frozen=True)
class InstanceConfig:
    """Parameters of the random instance generators."""

    max_rank: int = 12
    entry_bound: int = 3
    divisible_fraction: float = 0.35
    max_tries: int = 50


def random_instance(rng, cfg=InstanceConfig()):
    """Random (form, sublattice) pair; u from :func:`projector_endo`."""
    for _ in range(cfg.max_tries):
        n = int(rng.integers(1, cfg.max_rank // 2 + 1))
        E0 = standard_form(n, random_type(rng, n))
        P = random_unimodular(rng, 2 * n)
        pl = PolarizedLattice(conjugate(E0, P))
        k = 2 * int(rng.integers(0, n + 1))
        if k == 0:
            return pl, SymEndomorphism(intlat.zeros(2 * n, 2 * n), int(rng.integers(1, 4)))
        raw = rng.integers(-cfg.entry_bound, cfg.entry_bound + 1, size=(k, 2 * n))
        B = intlat.saturate(intlat.intmat(raw))
        if B.shape[0] != k:
            continue
        EA = pl.restrict(B)
        if intlat.rank(EA) != k:
            continue
        return pl, projector_endo(pl, B)
    raise LatticeError("could not draw a nondegenerate instance")


def random_divisible_instance(rng, cfg=InstanceConfig()):
    """Instance whose restricted form is divisible by q.

    The lattice is k copies of a principal lattice X (plus an optional extra
    block) and A is the diagonal copy ``{(c_1 x, ..., c_k x)}`` with
    ``gcd(c) = 1``; the restricted form is ``(sum c_j^2)`` times that of X.
    """
    for _ in range(cfg.max_tries):
        h = int(rng.integers(1, 3))
        k = int(rng.integers(2, 4))
        extra = int(rng.integers(0, 2))
        n = h * k + extra
        if 2 * n > cfg.max_rank:
            continue
        c = [int(v) for v in rng.integers(-2, 3, size=k)]
        g = 0
        for v in c:
            g = gcd(g, v)
        if g != 1:
            continue
        types = [1] * (h * k) + [int(rng.integers(1, 4))] * extra
        E0 = standard_form(n, types)
        rows = []
        for e in range(2 * h):
            v = [0] * (2 * n)
            for j, cj in enumerate(c):
                v[2 * h * j + e] = cj
            rows.append(v)
        B0 = intlat.intmat(rows)
        P = random_unimodular(rng, 2 * n)
        Pinv = intlat.unimodular_inverse(P)
        pl = PolarizedLattice(conjugate(E0, P))
        B = intlat.matmul(B0, Pinv.T)
        q = sum(v * v for v in c)
        return pl, projector_endo(pl, B, q)
    raise LatticeError("could not draw a divisible instance")


@dataclass(frozen=True)
class SelftestResult:
    trials: int
    failures: list
    divisible_checked: int


def selftest(trials, seed, cfg=InstanceConfig()):
    """Run the order identities (and the induced-type equality when it
    applies) on seeded random instances."""
    rng = np.random.default_rng(seed)
    failures = []
    div_checked = 0
    for t in range(trials):
        if rng.random() < cfg.divisible_fraction:
            pl, se = random_divisible_instance(rng, cfg)
        else:
            pl, se = random_instance(rng, cfg)
        rep = verify_polarization_identities(pl, se)
        for c in rep.failures:
            failures.append((t, c.name, c.witness))
        B = _sat_image(se.u)
        if B.shape[0] and divisibility_witness(pl.restrict(B), se.q) is None:
            div_checked += 1
            it = induced_type(pl, se, B)
            if not it.equal:
                failures.append((t, "induced_type", f"{it.from_form} vs {it.from_image}"))
    return SelftestResult(trials, failures, div_checked)
