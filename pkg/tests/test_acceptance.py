"""Acceptance suite: one test per criterion, each with its runtime budget.

The terminal summary prints one ``criterion N: PASS|FAIL`` line per test.
"""

import json
import time
from fractions import Fraction
from functools import lru_cache
from math import gcd

import pytest

from prymweyl import golden
from prymweyl.cli import EXIT_OK, main
from prymweyl.corr import correspondence_set, gamma_group, invariant_report, verify_identities
from prymweyl.cover import random_etale_cover, validate_cover
from prymweyl.homology import build_homology_model, end_to_end_type, endo_set, trivial_model
from prymweyl.polab import selftest, standard_form
from prymweyl.rootsys import build_root_datum, fundamental_weight
from prymweyl.weyl import orbit

END_TO_END = [("A", 2, 1, 3), ("A", 3, 1, 4), ("A", 4, 2, 5)]
SEEDS = range(5)


class Budget:
    def __init__(self, seconds):
        self.seconds = seconds

    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.start
        if exc[0] is None:
            assert self.elapsed < self.seconds, f"took {self.elapsed:.1f} s"


@lru_cache(maxsize=None)
def _instance(family, rank, i, g, seed):
    rd = build_root_datum(family, rank)
    od = orbit(rd, fundamental_weight(rd, i))
    cd = random_etale_cover(rd, g, seed, od)
    hm = build_homology_model(cd, od)
    cs = correspondence_set(rd, od.lam)
    return rd, od, cd, hm, cs


@pytest.fixture(autouse=True)
def serial(monkeypatch):
    monkeypatch.setenv("RT_THREADS", "1")


@pytest.mark.criterion(1, "invariant tables reproduced exactly")
def test_criterion_1_tables(capsys):
    with Budget(30):
        code = main(["table", "--all-paper", "--json"])
        data = json.loads(capsys.readouterr().out)
    assert code == EXIT_OK and data["mismatches"] == []
    computed = {(r["family"], r["rank"], r["weight"]): r for r in data["invariants"]}
    refs = golden.invariant_rows()
    assert {("A", n) for n in range(2, 9)} <= {(r.family, r.rank) for r in refs}
    assert {("D", n) for n in range(4, 9)} <= {(r.family, r.rank) for r in refs}
    for ref in refs:
        row = computed[ref.key]
        assert Fraction(row["norm"]) == ref.norm, ref.key
        assert (row["d"], row["dim_V"]) == (ref.d, ref.dim_V), ref.key
        assert Fraction(row["q"]) == Fraction(row["dynkin"]) == ref.q, ref.key
        assert Fraction(row["deg_K"]) == ref.deg_K, ref.key


@pytest.mark.criterion(2, "polarization type and Verlinde numbers")
def test_criterion_2_types():
    with Budget(5):
        for ref in golden.type_rows():
            rd = build_root_datum(ref.family, ref.rank)
            cs = correspondence_set(rd, fundamental_weight(rd, ref.weight))
            for g in golden.genera():
                rep = invariant_report(rd, ref.weight, g, cs)
                assert rep.m == ref.m, (ref.key, g)
                assert rep.type_of_M.invariants == (ref.m,) * (2 * g) if ref.m > 1 \
                    else rep.type_of_M.is_trivial
                assert rep.h0 == golden.verlinde(ref.group, ref.group_arg, g), (ref.key, g)


@pytest.mark.criterion(3, "exponent differs from Dynkin index for G2 and F4")
def test_criterion_3_q_differs():
    expected = {("G", 2, 1): (2, 6), ("F", 4, 4): (6, 12)}
    assert {(r.family, r.rank, r.weight): (r.dynkin, r.q) for r in golden.q_differs_rows()} \
        == expected
    for (family, rank, w), (dyn, q) in expected.items():
        rd = build_root_datum(family, rank)
        rep = invariant_report(rd, w, 2)
        assert (rep.dynkin, rep.q) == (dyn, q)
        assert not rep.q_equals_dynkin


@pytest.mark.criterion(4, "correspondence identities on every table row")
def test_criterion_4_identities():
    with Budget(60):
        keys = dict.fromkeys(r.key for r in golden.invariant_rows())
        seen_e8 = False
        for family, rank, w in keys:
            rd = build_root_datum(family, rank)
            cs = correspondence_set(rd, fundamental_weight(rd, w))
            rep = verify_identities(cs)
            assert rep.all_passed, (family, rank, w, [(c.name, c.witness) for c in rep.failures])
            seen_e8 |= (family, rank, w) == ("E", 8, 8) and cs.d == 240
    assert seen_e8


@pytest.mark.criterion(5, "orbit spans the weight lattice")
def test_criterion_5_gamma():
    trivial = [("E", 8, 8), ("E", 7, 7), ("E", 6, 1), ("E", 6, 6),
               ("D", 5, 4), ("D", 5, 5), ("D", 7, 6), ("D", 7, 7)]
    trivial += [("A", n, i) for n in range(1, 9) for i in range(1, n + 1) if gcd(i, n + 1) == 1]
    with Budget(10):
        for family, rank, w in trivial:
            rd = build_root_datum(family, rank)
            assert gamma_group(rd, fundamental_weight(rd, w)).is_trivial, (family, rank, w)
        rd = build_root_datum("A", 3)
        assert gamma_group(rd, fundamental_weight(rd, 2)).invariants == (2,)


@pytest.mark.criterion(6, "random polarized lattice property suite")
def test_criterion_6_polab():
    with Budget(60):
        res = selftest(200, seed=20261015)
    assert res.trials == 200 and res.failures == []
    assert res.divisible_checked > 0


@pytest.mark.criterion(7, "end-to-end polarization type on random covers")
def test_criterion_7_end_to_end():
    with Budget(300):
        for family, rank, i, m in END_TO_END:
            for seed in SEEDS:
                rd, od, cd, hm, cs = _instance(family, rank, i, 2, seed)
                assert validate_cover(cd, rd, od).generation_status == "certified"
                rep = end_to_end_type(hm, cs)
                tag = (family, rank, i, seed)
                assert [x for x in rep.k_of_S if x > 1] == [od.d] * 4, tag
                assert rep.divisible and rep.q == cs.q, tag
                assert [x for x in rep.type_of_M if x > 1] == [m] * 4, tag
                assert rep.m_formula == m and rep.match, tag
                assert rep.induced_type_match and rep.ok, tag


@pytest.mark.criterion(8, "homology model self-checks")
def test_criterion_8_homology():
    for g in (1, 2, 3):
        hm = trivial_model(g)
        assert hm.checks.all_passed and (hm.E == standard_form(g)).all()

    cases = [(*c[:3], 2, s) for c in END_TO_END for s in SEEDS] + [("A", 1, 1, 2, 0)]
    for key in cases:
        _, od, _, hm, cs = _instance(*key)
        g = key[3]
        assert hm.rank_H1 == 2 * (od.d * (g - 1) + 1), key
        assert hm.checks.all_passed, (key, [c.name for c in hm.checks.failures])
        assert not (hm.E + hm.E.T).any()
        es = endo_set(hm, cs)
        assert es.checks.all_passed, (key, [c.name for c in es.checks.failures])
        for name in ("t_symmetric", "v_symmetric", "vt_tv_degree", "u_quadratic_on_S"):
            assert es.checks[name].passed, (key, name)
