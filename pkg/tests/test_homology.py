from functools import lru_cache

import pytest

from prymweyl import intlat
from prymweyl.corr import correspondence_set
from prymweyl.cover import random_etale_cover
from prymweyl.errors import HomologyError
from prymweyl.homology import (build_homology_model, deck_invariance, end_to_end_type, endo_set,
                               relator_letters, trivial_model)
from prymweyl.polab import PolarizedLattice, projector_endo, standard_form, verify_polarization_identities
from prymweyl.rootsys import build_root_datum, fundamental_weight
from prymweyl.weyl import orbit


@lru_cache(maxsize=None)
def instance(family, rank, i, g=2, seed=0):
    rd = build_root_datum(family, rank)
    lam = fundamental_weight(rd, i) if i else rd.rho
    od = orbit(rd, lam)
    cd = random_etale_cover(rd, g, seed, od)
    return rd, od, cd, build_homology_model(cd, od)


def test_relator_letters_shape():
    letters = relator_letters(2)
    assert len(letters) == 8
    assert sorted(g for g, _ in letters) == [0, 0, 1, 1, 2, 2, 3, 3]


@pytest.mark.parametrize("g", [1, 2, 3])
def test_trivial_cover_gives_standard_form(g):
    hm = trivial_model(g)
    assert hm.rank_H1 == 2 * g
    assert (hm.E == standard_form(g)).all()
    assert hm.checks.all_passed


@pytest.mark.parametrize("family,rank,i,rank_h1", [
    ("A", 1, 1, 6), ("A", 2, 1, 8), ("A", 3, 1, 10), ("A", 4, 2, 22), ("B", 2, 1, 10),
])
def test_model_rank_and_checks(family, rank, i, rank_h1):
    _, od, _, hm = instance(family, rank, i)
    assert hm.rank_H1 == rank_h1 == 2 * (od.d + 1)
    assert hm.checks.all_passed, [c.name for c in hm.checks.failures]
    assert not (hm.E + hm.E.T).any()
    assert abs(intlat.det(hm.E)) == 1


def test_pullback_scales_the_form_by_degree():
    _, od, _, hm = instance("A", 3, 1)
    pulled = intlat.matmul(intlat.matmul(hm.psi.T, hm.E), hm.psi)
    assert (pulled == od.d * standard_form(2)).all()


@pytest.mark.parametrize("family,rank,i,q,rank_s", [
    ("A", 1, 1, 1, 2), ("A", 2, 1, 1, 4), ("A", 4, 2, 3, 18),
])
def test_endomorphism_identities(family, rank, i, q, rank_s):
    rd, od, _, hm = instance(family, rank, i)
    cs = correspondence_set(rd, od.lam)
    es = endo_set(hm, cs)
    assert es.checks.all_passed
    assert es.q == q and es.rank_S == rank_s
    assert (intlat.matmul(es.u_S, es.u_S) == q * es.u_S).all()


def test_trace_is_the_projector_onto_the_pullback():
    rd, od, _, hm = instance("A", 2, 1)
    es = endo_set(hm, correspondence_set(rd, od.lam))
    pl = PolarizedLattice(hm.E)
    se = projector_endo(pl, hm.psi.T, od.d)
    assert (se.u == es.t).all()
    assert verify_polarization_identities(pl, se).all_passed


def test_non_equivariant_chain_map_rejected():
    _, od, _, hm = instance("A", 2, 1)
    F = intlat.zeros(od.d, od.d)
    F[0, 1] = 1
    with pytest.raises(HomologyError):
        hm.fibre_chain_map(F, "bogus")


def test_endo_set_rejects_mismatched_orbit():
    _, _, _, hm = instance("A", 2, 1)
    rd = build_root_datum("A", 2)
    with pytest.raises(HomologyError):
        endo_set(hm, correspondence_set(rd, fundamental_weight(rd, 2)))


@pytest.mark.parametrize("family,rank,i,m,q", [
    ("A", 2, 1, 3, 1), ("A", 3, 1, 4, 1), ("A", 4, 2, 5, 3),
])
def test_end_to_end_type(family, rank, i, m, q):
    rd, od, _, hm = instance(family, rank, i)
    rep = end_to_end_type(hm, correspondence_set(rd, od.lam))
    assert rep.ok and rep.match and rep.divisible and rep.q == q
    assert [x for x in rep.type_of_M if x > 1] == [m] * 4
    assert [x for x in rep.k_of_S if x > 1] == [od.d] * 4
    assert rep.isotypic_match
    assert rep.to_json()["schema"] == 1


def test_monodromy_independence():
    types = set()
    for seed in range(5):
        rd, od, _, hm = instance("A", 3, 1, seed=seed)
        rep = end_to_end_type(hm, correspondence_set(rd, od.lam))
        types.add(tuple(rep.type_of_M))
    assert len(types) == 1


def test_genus_three_model():
    rd, od, _, hm = instance("A", 2, 1, g=3, seed=4)
    assert hm.rank_H1 == 2 * (3 * 2 + 1)
    rep = end_to_end_type(hm, correspondence_set(rd, od.lam))
    assert rep.ok and [x for x in rep.type_of_M if x > 1] == [3] * 6


@pytest.mark.parametrize("family,rank", [("A", 2), ("A", 3), ("B", 2), ("A", 4)])
def test_deck_transformations_preserve_the_form(family, rank):
    _, od, _, hm = instance(family, rank, 0)
    assert od.d == od.base.weyl_order
    assert deck_invariance(hm, od)


def test_deck_invariance_needs_regular_orbit():
    _, od, _, hm = instance("A", 2, 1)
    with pytest.raises(HomologyError):
        deck_invariance(hm, od)


def test_a1_smoke_case_fails_theorem_hypotheses_but_not_self_checks():
    rd, od, _, hm = instance("A", 1, 1)
    rep = end_to_end_type(hm, correspondence_set(rd, od.lam))
    # the pullback from X is not injective for a double cover, so the Prym
    # restriction is (Z/2)^2 rather than (Z/2)^4
    assert hm.checks.all_passed and rep.identities_passed
    assert not rep.psi_image_saturated
    assert rep.k_of_S == [2, 2] and not rep.k_of_S_expected and not rep.match
