"""Integral homology of an étale cover of a closed surface, with correspondences.

The base surface has one vertex, edges ``x_1 .. x_2g`` and one face glued
along ``[x_1, x_2] [x_3, x_4] ...``.  The cover has the fibre ``{0..d-1}``
over the vertex; the lift of ``x`` starting at fibre point ``c`` is edge
``gen * d + c`` and ends at ``perm_gen[c]``.  Face ``c`` is the lift of the
relator starting at ``c``.

The intersection form is obtained from a cellular cup product on cochains,
restricted to a basis of cocycles dual to the chosen basis of H_1, and
inverted.  Its conventions are guarded by checks at construction time:
alternating, unimodular, and ``E(psi^* x, psi^* y) = d * E_X(x, y)`` with
``E_X`` the standard symplectic form.  The global sign is chosen to make
the last identity hold with a plus sign.
"""

from dataclasses import dataclass, field
from math import gcd

import numpy as np

from . import intlat, polab
from .checks import Check, Report
from .errors import HomologyError
from .intlat import FiniteAbelianGroup
from .weyl import apply_word, word_permutation


def relator_letters(genus):
    out = []
    for i in range(genus):
        out += [(2 * i, 1), (2 * i + 1, 1), (2 * i, -1), (2 * i + 1, -1)]
    return out


def _inverse_perm(p):
    inv = [0] * len(p)
    for k, v in enumerate(p):
        inv[v] = k
    return inv


def _blockdiag(block, copies):
    n = block.shape[0]
    out = intlat.zeros(n * copies, n * copies)
    for k in range(copies):
        out[k * n:(k + 1) * n, k * n:(k + 1) * n] = block
    return out


@dataclass(eq=False)
class HomologyModel:
    genus: int
    d: int
    perms: tuple
    D1: np.ndarray
    D2: np.ndarray
    Q: np.ndarray
    Pr: np.ndarray
    Hb: np.ndarray
    E: np.ndarray
    psi: np.ndarray
    nm: np.ndarray
    checks: Report
    od: object = field(default=None)

    @property
    def n_edges(self):
        return 2 * self.genus * self.d

    @property
    def rank_H1(self):
        return self.E.shape[0]

    @property
    def g_Y(self):
        return self.rank_H1 // 2

    def induced(self, F1):
        """Action on H_1 of an edge-chain map (columns are images)."""
        return intlat.matmul(intlat.matmul(self.Pr, intlat.intmat(F1)), self.Hb)

    def fibre_chain_map(self, F, name="fibre map"):
        """Edge-chain map ``e_(gen, c) -> sum_c' F[c', c] e_(gen, c')``.

        Raises unless it commutes with both boundary maps.
        """
        F = intlat.intmat(F)
        F1 = _blockdiag(F, 2 * self.genus)
        if not (intlat.matmul(self.D1, F1) == intlat.matmul(F, self.D1)).all():
            raise HomologyError("chain_map", f"{name} does not commute with d1")
        if not (intlat.matmul(F1, self.D2) == intlat.matmul(self.D2, F)).all():
            raise HomologyError("chain_map", f"{name} does not commute with d2")
        return F1


def standard_symplectic(g):
    return polab.standard_form(g)


def build_from_permutations(perms, genus, od=None):
    """Homology model of the étale cover with given monodromy permutations."""
    perms = [tuple(p) for p in perms]
    if len(perms) != 2 * genus or genus < 1:
        raise HomologyError("input", "need 2g permutations with g >= 1")
    d = len(perms[0])
    invs = [_inverse_perm(p) for p in perms]
    N1 = 2 * genus * d
    D1 = intlat.zeros(d, N1)
    for gen, p in enumerate(perms):
        for c in range(d):
            col = gen * d + c
            D1[p[c], col] += 1
            D1[c, col] -= 1
    D2 = intlat.zeros(N1, d)
    Q = [[0] * N1 for _ in range(N1)]
    letters = relator_letters(genus)
    for c in range(d):
        v = c
        prefix = {}
        for gen, s in letters:
            if s > 0:
                e = gen * d + v
                v = perms[gen][v]
            else:
                v = invs[gen][v]
                e = gen * d + v
            D2[e, c] += s
            row = Q[e]
            for k, val in prefix.items():
                row[k] -= s * val
            if s > 0:
                row[e] -= 1
            prefix[e] = prefix.get(e, 0) + s
        if v != c:
            raise HomologyError("face_closes", f"lift of the relator at {c} ends at {v}")
    Q = np.array(Q, dtype=object).reshape(N1, N1)
    checks = []

    boundary_sq = intlat.matmul(D1, D2)
    checks.append(Check("boundary_squared_zero", not boundary_sq.any()))
    fund = D2.sum(axis=1)
    checks.append(Check("fundamental_cycle", not any(fund)))

    dec1 = intlat.snf(D1)
    r = dec1.rank
    Vi_cyc = dec1.Vinv[r:]
    M = intlat.matmul(Vi_cyc, D2)
    dec2 = intlat.snf(M)
    r2 = dec2.rank
    if any(x != 1 for x in dec2.divisors):
        raise HomologyError("torsion_free", f"boundary divisors {dec2.divisors}")
    Pr = intlat.matmul(dec2.U, Vi_cyc)[r2:]
    Hb = intlat.matmul(dec1.V[:, r:], dec2.Uinv[:, r2:])
    ncomp = d - r
    gY_expected = d * (genus - 1) + 1
    rank = Pr.shape[0]
    if ncomp == 1 and rank != 2 * gY_expected:
        raise HomologyError("rank", f"H1 has rank {rank}, expected {2 * gY_expected}")
    checks.append(Check("rank", ncomp != 1 or rank == 2 * gY_expected,
                        f"rank {rank}, components {ncomp}"))
    if not (intlat.matmul(Pr, Hb) == intlat.identity(rank)).all():
        raise HomologyError("dual_basis", "cocycle basis is not dual to the cycle basis")

    C = intlat.matmul(intlat.matmul(Pr, Q), Pr.T)
    if (C + C.T).any():
        raise HomologyError("alternating", "cup product is not alternating on H^1")
    checks.append(Check("alternating", True))
    Cinv, det_den = intlat.inverse_scaled(C)
    if det_den != 1:
        raise HomologyError("unimodular", f"cup product has elementary divisor {det_den}")
    checks.append(Check("unimodular", True))
    E = Cinv.T

    J1 = intlat.zeros(N1, 2 * genus)
    for gen in range(2 * genus):
        J1[gen * d:(gen + 1) * d, gen] = 1
    psi = intlat.matmul(Pr, J1)
    nm = intlat.matmul(J1.T, Hb)
    std = standard_symplectic(genus)
    pulled = intlat.matmul(intlat.matmul(psi.T, E), psi)
    if (pulled == -d * std).all():
        E = -E
        pulled = -pulled
    if not (pulled == d * std).all():
        raise HomologyError("pullback_scaling", "psi^* E_Y psi != d * standard form")
    checks.append(Check("pullback_scaling", True))
    if d == 1:
        edge = intlat.matmul(intlat.matmul(Pr.T, E), Pr)
        if not (edge == std).all():
            raise HomologyError("trivial_reduction", "trivial cover does not give the standard form")
        checks.append(Check("trivial_reduction", True))
    return HomologyModel(genus, d, tuple(perms), D1, D2, Q, Pr, Hb, E, psi, nm,
                         Report(tuple(checks)), od)


def build_homology_model(cd, od):
    """Homology model of an étale cover given by monodromy words."""
    if not cd.is_etale:
        raise HomologyError("etale", "ramified covers are not modelled")
    perms = [word_permutation(od, w) for w in cd.generators]
    return build_from_permutations(perms, cd.genus, od)


def trivial_model(genus):
    return build_from_permutations([(0,)] * (2 * genus), genus)


def _is_symmetric(E, f):
    return bool((intlat.matmul(f.T, E) == intlat.matmul(E, f)).all())


@dataclass(eq=False)
class EndoSet:
    t: np.ndarray
    v: np.ndarray
    S: np.ndarray
    u_S: np.ndarray
    q: int
    deg: int
    checks: Report

    @property
    def rank_S(self):
        return self.S.shape[0]


def check_equivariant(od, K):
    for a in od.simple_action:
        Ka = K[np.ix_(a, a)]
        if not (Ka == K).all():
            return False
    return True


def endo_set(hm, cs):
    """Trace and Kanev endomorphisms on H_1 and the restriction to the Prym lattice."""
    if hm.od is not None and hm.od.points != cs.od.points:
        raise HomologyError("indexing", "model and correspondence use different orbits")
    if hm.d != cs.d:
        raise HomologyError("indexing", "fibre size differs from orbit size")
    if not check_equivariant(cs.od, cs.K):
        raise HomologyError("equivariance", "Kanev matrix is not W-invariant")
    d, E = hm.d, hm.E
    n = hm.rank_H1
    I = intlat.identity(n)
    deg = cs.deg_K
    q = cs.q
    if deg.denominator != 1 or q.denominator != 1:
        raise HomologyError("integrality", f"deg = {deg}, q = {q}")
    deg, q = int(deg), int(q)

    ones = np.ones((d, d), dtype=object)
    t = hm.induced(hm.fibre_chain_map(ones, "trace"))
    K1 = hm.fibre_chain_map(cs.K, "Kanev")
    v = hm.induced(K1) - I
    checks = [
        Check("t_is_psi_nm", bool((t == intlat.matmul(hm.psi, hm.nm)).all())),
        Check("t_symmetric", _is_symmetric(E, t)),
        Check("v_symmetric", _is_symmetric(E, v)),
        Check("t_quadratic", bool((intlat.matmul(t, t) == d * t).all())),
    ]
    vt, tv = intlat.matmul(v, t), intlat.matmul(t, v)
    checks.append(Check("vt_tv_degree", bool((vt == tv).all() and (vt == (deg - 1) * t).all())))
    V = v + I
    cubic = intlat.matmul(intlat.matmul(V - I, V + (q - 1) * I), V - deg * I)
    checks.append(Check("kanev_cubic_on_H1", not cubic.any()))

    S = polab._sat_image(d * I - t)
    vS = intlat.matmul(v, S.T).T
    coords = intlat.solve_rows_int(S, vS)
    u_S = -coords.T
    checks.append(Check("u_quadratic_on_S",
                        bool((intlat.matmul(u_S, u_S) == q * u_S).all())))
    rep = Report(tuple(checks))
    if not rep.all_passed:
        bad = ", ".join(c.name for c in rep.failures)
        raise HomologyError("endomorphisms", bad)
    return EndoSet(t, v, S, u_S, q, deg, rep)


@dataclass
class EndToEndReport:
    g_Y: int
    ranks: dict
    k_of_S: list
    q: int
    divisible: bool
    type_of_M: list
    m_formula: int
    match: bool
    k_of_S_expected: bool
    induced_type_match: bool
    isotypic_match: bool
    psi_image_saturated: bool
    identities_passed: bool
    checks: list

    def to_json(self):
        return {
            "schema": 1, "g_Y": self.g_Y, "ranks": self.ranks, "k_of_S": self.k_of_S,
            "q": self.q, "divisible": self.divisible, "type_of_M": self.type_of_M,
            "m_formula": self.m_formula, "match": self.match,
            "k_of_S_expected": self.k_of_S_expected,
            "induced_type_match": self.induced_type_match,
            "isotypic_match": self.isotypic_match,
            "psi_image_saturated": self.psi_image_saturated,
            "identities_passed": self.identities_passed,
            "checks": self.checks,
        }

    @property
    def ok(self):
        return (self.match and self.divisible and self.k_of_S_expected
                and self.induced_type_match and self.psi_image_saturated
                and self.identities_passed)


def _padded(n_ones, m, count):
    return [1] * n_ones + [m] * count if m > 1 else [1] * (n_ones + count)


def end_to_end_type(hm, cs, es=None):
    """Polarization type on the isotypic Prym lattice, against the closed formula."""
    es = es or endo_set(hm, cs)
    g, d, q, E = hm.genus, hm.d, es.q, hm.E
    m = d // gcd(es.deg - 1, d)
    S = es.S
    E_S = intlat.matmul(intlat.matmul(S, E), S.T)
    k_S = intlat.elementary_divisors(E_S)
    rank_S = S.shape[0]
    k_S_ok = k_S == _padded(rank_S - 2 * g, d, 2 * g)

    pl_S = polab.PolarizedLattice(E_S)
    se = polab.SymEndomorphism(es.u_S, q)
    if se.violations(pl_S):
        raise HomologyError("u_on_S", "; ".join(se.violations(pl_S)))
    P_S = polab._sat_image(es.u_S)
    rank_P = P_S.shape[0]
    E_P = intlat.matmul(intlat.matmul(P_S, E_S), P_S.T)
    divisible = not any(x % q for x in E_P.reshape(-1))
    type_M = intlat.elementary_divisors(E_P // q) if divisible else []
    match = divisible and type_M == _padded(rank_P - 2 * g, m, 2 * g)

    induced_ok = False
    if divisible:
        it = polab.induced_type(pl_S, se, P_S)
        induced_ok = it.equal and it.from_form == FiniteAbelianGroup.cyclic_power(m, 2 * g)

    s1 = hm.fibre_chain_map(cs.S_num, "Schur")
    iso = polab._sat_image(hm.induced(s1))
    P_H = intlat.matmul(P_S, S)
    isotypic = intlat.lattice_equal(iso, P_H)

    psi_rows = hm.psi.T
    grp, _ = intlat.quotient_group(intlat.saturate(psi_rows), psi_rows)
    psi_sat = grp.is_trivial

    ids = polab.verify_polarization_identities(pl_S, se)
    checks = [c.name for c in hm.checks] + [c.name for c in es.checks]
    return EndToEndReport(
        g_Y=hm.g_Y,
        ranks={"H1": hm.rank_H1, "S": rank_S, "P": rank_P},
        k_of_S=k_S, q=q, divisible=divisible, type_of_M=type_M, m_formula=m,
        match=match, k_of_S_expected=k_S_ok, induced_type_match=induced_ok,
        isotypic_match=isotypic, psi_image_saturated=psi_sat,
        identities_passed=ids.all_passed, checks=checks,
    )


def deck_permutations(od):
    """Deck transformations of the regular orbit: ``rho w -> (rho s_i) w``."""
    rd = od.base
    out = []
    for i in range(rd.rank):
        start = rd.reflect(od.lam, i)
        out.append(tuple(od.index[apply_word(rd, start, w)] for w in od.words))
    return out


def deck_invariance(hm, od):
    """Whether every deck transformation preserves the intersection form."""
    if len(set(od.lam)) and od.d != od.base.weyl_order:
        raise HomologyError("deck", "orbit is not regular")
    for delta in deck_permutations(od):
        F = intlat.zeros(od.d, od.d)
        for c in range(od.d):
            F[delta[c], c] = 1
        D = hm.induced(hm.fibre_chain_map(F, "deck"))
        if not (intlat.matmul(intlat.matmul(D.T, hm.E), D) == hm.E).all():
            return False
    return True
