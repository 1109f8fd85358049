import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from prymweyl import intlat
from prymweyl.errors import LatticeError
from prymweyl.polab import (InstanceConfig, PolarizedLattice, SymEndomorphism, _sat_image,
                            conjugate, decompose, divisibility_witness, induced_type, k_group,
                            projector_endo, random_divisible_instance, random_instance,
                            random_unimodular, selftest, standard_form, verify_polarization_identities)


def test_k_group_of_principal_and_type_1_2():
    assert k_group(PolarizedLattice(standard_form(3))).group.is_trivial
    pl = PolarizedLattice(standard_form(2, [1, 2]))
    assert pl.type == (1, 2)
    assert k_group(pl).group.invariants == (2, 2)


def test_k_group_generators_are_dual_lattice():
    pl = PolarizedLattice(standard_form(2, [2, 6]))
    gens = k_group(pl).generators
    assert intlat.is_integral(intlat.matmul(gens, pl.E))


@pytest.mark.parametrize("E", [
    [[0, 1], [1, 0]], [[0, 1, 0], [-1, 0, 0], [0, 0, 0]], [[0, 0], [0, 0]],
])
def test_invalid_forms_rejected(E):
    with pytest.raises(LatticeError):
        PolarizedLattice(intlat.intmat(E))


def test_projector_onto_first_plane():
    pl = PolarizedLattice(standard_form(2))
    se = projector_endo(pl, intlat.intmat([[1, 0, 0, 0], [0, 1, 0, 0]]), 1)
    assert (se.u == np.diag(np.array([1, 1, 0, 0], dtype=object))).all()


def test_projector_on_generic_sublattice():
    pl = PolarizedLattice(standard_form(2))
    B = intlat.intmat([[1, 2, 0, 1], [0, 1, 3, -1]])
    se = projector_endo(pl, B)
    assert not se.violations(pl)
    assert intlat.lattice_equal(_sat_image(se.u), B)


def test_projector_rejects_too_small_exponent():
    pl = PolarizedLattice(standard_form(2))
    B = intlat.intmat([[1, 0, 1, 0], [0, 1, 0, 1]])  # restricted type (2)
    with pytest.raises(LatticeError):
        projector_endo(pl, B, 1)


def test_decompose_extremes():
    pl = PolarizedLattice(standard_form(3, [1, 2, 2]))
    n = pl.n2
    full = decompose(pl, SymEndomorphism(3 * intlat.identity(n), 3))
    assert full.rank_A == n and full.rank_P == 0
    empty = decompose(pl, SymEndomorphism(intlat.zeros(n, n), 3))
    assert empty.rank_A == 0 and empty.rank_P == n
    for se in (full.se, empty.se):
        assert verify_polarization_identities(pl, se).all_passed


def test_decompose_rejects_non_idempotent():
    pl = PolarizedLattice(standard_form(1))
    with pytest.raises(LatticeError):
        decompose(pl, SymEndomorphism(intlat.intmat([[1, 1], [0, 1]]), 1))


def test_standard_projector_checks_pass():
    pl = PolarizedLattice(standard_form(3))
    u = np.diag(np.array([2, 2, 0, 0, 2, 2], dtype=object))
    se = SymEndomorphism(u, 2)
    rep = verify_polarization_identities(pl, se)
    assert rep.all_passed, [(c.name, c.witness) for c in rep.failures]
    # a principal restriction is divisible only by q = 1
    it = induced_type(pl, SymEndomorphism(u // 2, 1))
    assert it.equal and it.from_form.is_trivial and it.from_image.is_trivial


def _petersen():
    pairs = [(a, b) for a in range(5) for b in range(a + 1, 5)]
    return np.array([[int(not set(x) & set(y)) for y in pairs] for x in pairs], dtype=object)


def test_petersen_derived_endomorphism():
    # (K - I)(K - 3I) kills the eigenvalues 1 and 3 and is 15 on the -2 eigenspace
    K = _petersen()
    I = intlat.identity(10)
    u0 = intlat.matmul(K - I, K - 3 * I)
    u = np.kron(u0, np.eye(2, dtype=int)).astype(object)
    pl = PolarizedLattice(standard_form(10))
    se = SymEndomorphism(u, 15)
    assert not se.violations(pl)
    pair = decompose(pl, se)
    assert (pair.rank_A, pair.rank_P) == (8, 12)
    rep = verify_polarization_identities(pl, se, pair)
    assert rep.all_passed, [(c.name, c.witness) for c in rep.failures]


def test_induced_type_reports_nondivisible_entry():
    pl = PolarizedLattice(standard_form(2))
    B = intlat.intmat([[1, 0, 1, 0], [0, 1, 0, 1]])
    se = projector_endo(pl, B)  # q = 2, restricted form is 2 * principal
    assert induced_type(pl, se).equal
    se3 = SymEndomorphism(se.u * 3, 6)
    with pytest.raises(LatticeError, match=r"Gram entry \(0,1\)"):
        induced_type(pl, se3)
    assert divisibility_witness(pl.restrict(B), 4) == (0, 1, 2)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**6))
def test_type_invariant_under_unimodular_change(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 5))
    types = sorted(int(x) for x in rng.integers(1, 4, size=n))
    E = standard_form(n, types)
    P = random_unimodular(rng, 2 * n)
    assert PolarizedLattice(conjugate(E, P)).type == PolarizedLattice(E).type


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**6))
def test_complement_swaps_the_pair(seed):
    rng = np.random.default_rng(seed)
    pl, se = random_instance(rng, InstanceConfig(max_rank=8))
    a, b = decompose(pl, se), decompose(pl, se.complement())
    assert intlat.lattice_equal(a.lattice_A, b.lattice_P) or a.rank_A == 0
    assert intlat.lattice_equal(a.lattice_P, b.lattice_A) or a.rank_P == 0
    assert (a.G_A, a.K_A, a.G_P, a.K_P) == (b.G_P, b.K_P, b.G_A, b.K_A)
    assert a.A_cap_P == b.A_cap_P


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**6))
def test_random_instances_pass_every_check(seed):
    rng = np.random.default_rng(seed)
    pl, se = random_instance(rng)
    rep = verify_polarization_identities(pl, se)
    assert rep.all_passed, [(c.name, c.witness) for c in rep.failures]


def test_divisible_instances_induced_type_100_of_100():
    rng = np.random.default_rng(7)
    for _ in range(100):
        pl, se = random_divisible_instance(rng)
        it = induced_type(pl, se)
        assert it.equal, (it.from_form, it.from_image)


def test_selftest_small_run():
    res = selftest(40, seed=3)
    assert res.trials == 40 and not res.failures and res.divisible_checked > 0


def test_sym_endomorphism_requires_positive_q():
    with pytest.raises(LatticeError):
        SymEndomorphism(intlat.identity(2), 0)
