"""Schur and Kanev correspondence matrices on a Weyl orbit and their invariants.

Matrices are indexed by the canonical orbit order of :func:`weyl.orbit`.
The Gram matrix ``S`` of the orbit under the rescaled negative form is kept
as an integer matrix ``S_num`` together with a denominator ``den`` so that
``S == S_num / den`` exactly.
"""

from dataclasses import dataclass
from fractions import Fraction
from math import gcd

import numpy as np

from . import intlat
from .checks import Check, Report
from .rootsys import check_dominant, dynkin_index, integral_form, weight_system, weyl_dim
from .weyl import orbit, psi_star_injective


@dataclass(frozen=True, eq=False)
class CorrSet:
    od: object
    form: object
    S_num: np.ndarray
    den: int
    K: np.ndarray

    @property
    def d(self):
        return self.od.d

    @property
    def rank(self):
        return self.od.base.rank

    @property
    def norm(self):
        """The value of the rescaled form on (lam, lam)."""
        return Fraction(self.S_num[0, 0], self.den)

    @property
    def a(self):
        return self.norm + 1

    @property
    def q(self):
        return -self.d * self.norm / self.rank

    @property
    def q_is_integral(self):
        return self.q.denominator == 1 and self.q > 0

    @property
    def deg_K(self):
        return 1 - self.d * self.a

    @property
    def m(self):
        deg = self.deg_K
        assert deg.denominator == 1
        return self.d // gcd(int(deg) - 1, self.d)

    @property
    def S(self):
        return np.vectorize(lambda x: Fraction(x, self.den), otypes=[object])(self.S_num)

    @property
    def J(self):
        return np.ones((self.d, self.d), dtype=object)

    @property
    def I(self):
        return intlat.identity(self.d)


def correspondence_set(rd, lam, lattice="root", bound=10**6):
    lam = check_dominant(rd, lam)
    od = orbit(rd, lam, bound)
    form = integral_form(rd, lam, lattice)
    G = rd.weight_gram
    n = rd.rank
    # form on fundamental weights, cleared of denominators
    F = [[-form.scale * G[i][j] for j in range(n)] for i in range(n)]
    den = 1
    for row in F:
        for v in row:
            den = den * v.denominator // gcd(den, v.denominator)
    Fi = np.array([[int(v * den) for v in row] for row in F], dtype=object)
    P = od.matrix()
    S_num = intlat.matmul(intlat.matmul(P, Fi), P.T)
    diag = S_num[0, 0]
    off = S_num - diag - den
    if any(v % den for v in off.reshape(-1)):
        raise ValueError("Kanev entries are not integral")
    K = off // den
    np.fill_diagonal(K, 0)
    return CorrSet(od, form, S_num, den, K)


IdentityCheck = Check
IdentityReport = Report


def _first_diff(A, B):
    diff = np.argwhere(A != B)
    if len(diff) == 0:
        return ""
    i, j = diff[0]
    return f"entry ({i},{j}): {A[i, j]} != {B[i, j]}"


def verify_identities(cs):
    """Exact matrix identities satisfied by the Schur and Kanev matrices."""
    d, den = cs.d, cs.den
    S, K, I = cs.S_num, cs.K, cs.I
    a_num = cs.a * den
    checks = []

    rhs = (K - I) * den + int(a_num) * np.ones((d, d), dtype=object)
    checks.append(IdentityCheck("schur_equals_kanev_shift", bool((S == rhs).all()),
                                _first_diff(S, rhs)))

    deg = cs.deg_K
    deg_ok = deg.denominator == 1
    rows = K.sum(axis=1)
    bad = [i for i, r in enumerate(rows) if r != deg]
    checks.append(IdentityCheck("kanev_row_sums", deg_ok and not bad,
                                "" if not bad else f"row {bad[0]} sums to {rows[bad[0]]}, expected {deg}"))

    J = np.ones((d, d), dtype=object)
    KJ, JK, SJ, JS = (intlat.matmul(K, J), intlat.matmul(J, K),
                      intlat.matmul(S, J), intlat.matmul(J, S))
    target = J * int(deg) if deg_ok else None
    w = ""
    ok = deg_ok
    for name, M, T in (("KJ", KJ, target), ("JK", JK, target),
                       ("sJ", SJ, 0 * J), ("Js", JS, 0 * J)):
        if T is None or not (M == T).all():
            ok = False
            w = w or f"{name}: " + ("degree not integral" if T is None else _first_diff(M, T))
    checks.append(IdentityCheck("trace_relations", ok, w))

    q = cs.q
    lhs = intlat.matmul(S, S) * q.denominator
    rhs = -q.numerator * den * S
    checks.append(IdentityCheck("schur_quadratic", bool((lhs == rhs).all()),
                                _first_diff(lhs, rhs)))

    if deg_ok:
        f1 = K - I
        f2 = K * q.denominator + (q.numerator - q.denominator) * I
        f3 = K - int(deg) * I
        cubic = intlat.matmul(intlat.matmul(f1, f2), f3)
        zero = 0 * cubic
        checks.append(IdentityCheck("kanev_cubic", bool((cubic == zero).all()),
                                    _first_diff(cubic, zero)))
    else:
        checks.append(IdentityCheck("kanev_cubic", False, "degree not integral"))

    checks.append(IdentityCheck("exponent_integral", cs.q_is_integral,
                                "" if cs.q_is_integral else f"q = {q}"))
    return IdentityReport(tuple(checks))


def gamma_group(rd, lam, lattice="weight", od=None):
    """Quotient of the lattice by the span of the orbit of lam."""
    lam = check_dominant(rd, lam)
    od = od or orbit(rd, lam)
    P = od.matrix()
    if lattice == "root":
        alpha = [rd.weight_to_alpha(x) for x in od.points]
        if any(v.denominator != 1 for row in alpha for v in row):
            raise ValueError("weight is not in the root lattice")
        P = np.array([[int(v) for v in row] for row in alpha], dtype=object)
    grp, free = intlat.cokernel_structure(P)
    if free:
        raise ValueError("orbit does not span the lattice rationally")
    return grp


@dataclass(frozen=True)
class InvariantReport:
    family: str
    rank: int
    weight: int
    lattice: str
    norm: Fraction
    d: int
    dim_V: int
    q: Fraction
    dynkin: Fraction
    deg_K: Fraction
    gamma: intlat.FiniteAbelianGroup
    psi_star_injective: bool
    weight_kind: str
    genus: int

    @property
    def m(self):
        """None when the Kanev degree is not an integer."""
        if self.deg_K.denominator != 1:
            return None
        return self.d // gcd(int(self.deg_K) - 1, self.d)

    @property
    def type_of_M(self):
        if self.m is None:
            return None
        return intlat.FiniteAbelianGroup.cyclic_power(self.m, 2 * self.genus)

    @property
    def h0(self):
        return None if self.m is None else self.m ** self.genus

    @property
    def dim_prym(self):
        return self.rank * (self.genus - 1)

    @property
    def q_equals_dynkin(self):
        return self.q == self.dynkin

    @property
    def hypotheses(self):
        """Checkable hypotheses of the polarization-type formula."""
        return {
            "q_equals_dynkin": self.q_equals_dynkin,
            "gamma_trivial": self.gamma.is_trivial,
            "minuscule_or_quasi": self.weight_kind in ("minuscule", "quasi-minuscule"),
            "psi_star_injective": self.psi_star_injective,
        }

    @property
    def hypotheses_hold(self):
        return all(self.hypotheses.values())

    def as_dict(self):
        return {
            "family": self.family, "rank": self.rank, "weight": self.weight,
            "lattice": self.lattice, "norm": str(self.norm), "d": self.d,
            "dim_V": self.dim_V, "dim_V_omega": self.rank, "q": str(self.q),
            "dynkin": str(self.dynkin), "deg_K": str(self.deg_K),
            "gamma": list(self.gamma.invariants),
            "psi_star_injective": self.psi_star_injective,
            "weight_kind": self.weight_kind, "genus": self.genus, "m": self.m,
            "type_of_M": [self.m] * (2 * self.genus) if self.m and self.m > 1 else [],
            "h0": self.h0, "dim_prym": self.dim_prym,
            "hypotheses": self.hypotheses,
        }


def invariant_report(rd, weight_index, genus, cs=None):
    """All scalar invariants of (type, fundamental weight) at a given genus."""
    if genus < 1:
        raise ValueError("genus must be at least 1")
    lam = tuple(int(j == weight_index - 1) for j in range(rd.rank))
    cs = cs or correspondence_set(rd, lam)
    return InvariantReport(
        family=rd.family, rank=rd.rank, weight=weight_index, lattice=cs.form.lattice,
        norm=cs.norm, d=cs.d, dim_V=weyl_dim(rd, lam), q=cs.q,
        dynkin=dynkin_index(rd, lam), deg_K=cs.deg_K,
        gamma=gamma_group(rd, lam, od=cs.od),
        psi_star_injective=psi_star_injective(cs.od),
        weight_kind=weight_system(rd, lam).kind, genus=genus,
    )
