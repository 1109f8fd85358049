"""The ``rt`` command line.

Subcommands recompute the invariant tables, run the identity checks, and
compute polarization types on homology models of étale covers.

Exit codes: 0 success, 1 usage or input error, 2 mathematical mismatch.
"""

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import golden
from .corr import correspondence_set, gamma_group, invariant_report, verify_identities
from .cover import (CoverDatum, SearchConfig, curve_invariants, load_cover,
                    random_etale_cover, validate_cover)
from .errors import CoverError, HomologyError, PrymWeylError
from .homology import build_homology_model, end_to_end_type, endo_set
from .intlat import FiniteAbelianGroup
from .polab import InstanceConfig, selftest
from .rootsys import build_root_datum, fundamental_weight
from .weyl import CERTIFY_LIMIT, orbit, psi_star_injective

EXIT_OK, EXIT_USAGE, EXIT_MISMATCH = 0, 1, 2
MAX_H1_RANK = 600
DEFAULT_ORBIT_BOUND = 10**6

# weights whose orbit lattice quotient is known to be nontrivial
NEGATIVE_CONTROLS = {("A", 3, 2): (2,)}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


@dataclass(frozen=True)
class RunConfig:
    command: str
    family: str = None
    rank: int = None
    weight: int = None
    genus: int = None
    seed: int = 0
    seeds: int = None
    json: bool = False
    monodromy: str = None
    all_paper: bool = False
    all_weights: bool = False
    suite: str = None
    trials: int = 200
    max_attempts: int = 20000
    orbit_bound: int = DEFAULT_ORBIT_BOUND

    def __post_init__(self):
        for name in ("rank", "weight", "seeds", "trials", "max_attempts", "orbit_bound"):
            v = getattr(self, name)
            if v is not None and v <= 0:
                raise UsageError(f"--{name.replace('_', '-')} must be positive")
        if self.genus is not None and self.genus < 1:
            raise UsageError("--genus must be at least 1")
        if self.seed < 0:
            raise UsageError("--seed must be nonnegative")

    @classmethod
    def from_namespace(cls, ns):
        fields = {k: v for k, v in vars(ns).items() if k in cls.__dataclass_fields__}
        if fields.get("family"):
            fields["family"] = fields["family"].upper()
        return cls(**fields)

    def selection(self):
        if not self.family or not self.rank:
            raise UsageError("select a root system with --family and --rank")
        rd = build_root_datum(self.family, self.rank)
        if self.weight is not None and not 1 <= self.weight <= rd.rank:
            raise UsageError(f"weight index {self.weight} outside 1..{rd.rank}")
        return rd


def _workers():
    cap = os.environ.get("RT_THREADS")
    n = os.cpu_count() or 1
    if cap:
        try:
            n = min(n, max(1, int(cap)))
        except ValueError:
            raise UsageError(f"RT_THREADS={cap!r} is not an integer") from None
    return n


def _pmap(fn, items):
    """Order-preserving map, parallel across processes when allowed."""
    items = list(items)
    n = min(_workers(), len(items))
    if n <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))


def _emit(obj):
    print(json.dumps(obj, indent=2, sort_keys=True))


def _group_str(invariants):
    return str(FiniteAbelianGroup(tuple(x for x in invariants if x > 1)))


# ---------------------------------------------------------------- table

def _report_row(key):
    family, rank, weight, genus, bound = key
    rd = build_root_datum(family, rank)
    lam = fundamental_weight(rd, weight)
    cs = correspondence_set(rd, lam, bound=bound)
    row = invariant_report(rd, weight, genus, cs=cs).as_dict()
    row["flags"] = [] if row["q"] == row["dynkin"] else ["q_differs_from_dynkin"]
    return row


_CELLS = (("norm", Fraction), ("d", int), ("dim_V", int), ("q", Fraction), ("deg_K", Fraction))
_HEADER = (f"{'type':<5}{'weight':>7}{'(l,l)':>9}{'d':>6}{'dim V':>7}{'q':>6}"
           f"{'d_l':>6}{'deg K':>7}{'m':>4}  note")


def _format_row(row, note=""):
    return (f"{row['family'] + str(row['rank']):<5}{'w' + str(row['weight']):>7}{row['norm']:>9}"
            f"{row['d']:>6}{row['dim_V']:>7}{row['q']:>6}{row['dynkin']:>6}{row['deg_K']:>7}"
            f"{str(row['m']):>4}  {note}").rstrip()


def _compare_invariants(row, ref):
    out = []
    for cell, conv in _CELLS:
        if conv(row[cell]) != conv(getattr(ref, cell)):
            out.append(f"{ref.family}{ref.rank} w{ref.weight} {cell}: "
                       f"computed {row[cell]}, reference {getattr(ref, cell)}")
    if ref.q != Fraction(row["dynkin"]):
        out.append(f"{ref.family}{ref.rank} w{ref.weight}: Dynkin index {row['dynkin']} != q {ref.q}")
    return out


def _compare_types(row, ref, genera):
    out = []
    tag = f"{ref.family}{ref.rank} w{ref.weight}"
    if row["m"] != ref.m:
        out.append(f"{tag} m: computed {row['m']}, reference {ref.m}")
        return out, []
    if Fraction(row["q"]) != ref.q:
        out.append(f"{tag} q: computed {row['q']}, reference {ref.q}")
    entries = []
    for g in genera:
        h0 = row["m"] ** g
        ver = golden.verlinde(ref.group, ref.group_arg, g)
        if h0 != ver:
            out.append(f"{tag} g={g}: m^g = {h0}, Verlinde number {ver}")
        entries.append({"genus": g, "type_of_M": [row["m"]] * (2 * g) if row["m"] > 1 else [],
                        "m_pow_g": h0, "verlinde": ver})
    return out, entries


def table_reference(cfg):
    """Every reference row recomputed and diffed; returns (payload, mismatches)."""
    inv_refs = golden.invariant_rows()
    type_refs = golden.type_rows()
    qd_refs = golden.q_differs_rows()
    genera = golden.genera()
    keys = []
    for ref in [*inv_refs, *type_refs, *qd_refs]:
        k = (ref.family, ref.rank, ref.weight, 1, cfg.orbit_bound)
        if k not in keys:
            keys.append(k)
    computed = dict(zip([k[:3] for k in keys], _pmap(_report_row, keys)))

    mismatches, inv_out, type_out, qd_out = [], [], [], []
    for ref in inv_refs:
        row = computed[ref.key]
        mismatches += _compare_invariants(row, ref)
        inv_out.append({**row, "table": ref.table})
    for ref in type_refs:
        row = computed[ref.key]
        bad, entries = _compare_types(row, ref, genera)
        mismatches += bad
        type_out.append({"family": ref.family, "rank": ref.rank, "weight": ref.weight,
                         "q": row["q"], "m": row["m"], "group": ref.group,
                         "group_arg": ref.group_arg, "genera": entries})
    for ref in qd_refs:
        row = computed[(ref.family, ref.rank, ref.weight)]
        if Fraction(row["q"]) != ref.q or Fraction(row["dynkin"]) != ref.dynkin:
            mismatches.append(f"{ref.family}{ref.rank} w{ref.weight}: computed (q, d_l) = "
                              f"({row['q']}, {row['dynkin']}), reference ({ref.q}, {ref.dynkin})")
        qd_out.append(row)
    payload = {"schema": 1, "invariants": inv_out, "types": type_out,
               "q_differs": qd_out, "mismatches": mismatches}
    return payload, mismatches


def _print_reference(payload):
    for table in ("fixed", "family"):
        print(f"== {table} rows ==")
        print(_HEADER)
        for row in payload["invariants"]:
            if row["table"] == table:
                print(_format_row(row))
        print()
    print("== polarization type K(M) = (Z/m)^(2g) ==")
    print(f"{'type':<5}{'weight':>7}{'q':>6}{'m':>4}  group       m^g = Verlinde at g in "
          + ",".join(str(g) for g in golden.genera()))
    for t in payload["types"]:
        group = f"{t['group']}({t['group_arg']})" if t["group_arg"] else t["group"]
        ok = all(e["m_pow_g"] == e["verlinde"] for e in t["genera"])
        print(f"{t['family'] + str(t['rank']):<5}{'w' + str(t['weight']):>7}{t['q']:>6}{t['m']:>4}"
              f"  {group:<11} {'yes' if ok else 'NO'}")
    print()
    print("== q differs from the Dynkin index ==")
    print(_HEADER)
    for row in payload["q_differs"]:
        print(_format_row(row, "q != d_l"))
    print()
    bad = payload["mismatches"]
    print("all cells match the reference tables" if not bad
          else f"{len(bad)} mismatches:\n  " + "\n  ".join(bad))


def cmd_table(cfg):
    if cfg.all_paper:
        payload, bad = table_reference(cfg)
        _emit(payload) if cfg.json else _print_reference(payload)
        return EXIT_MISMATCH if bad else EXIT_OK
    rd = cfg.selection()
    weights = [cfg.weight] if cfg.weight else range(1, rd.rank + 1)
    genus = cfg.genus or 1
    rows = _pmap(_report_row, [(rd.family, rd.rank, w, genus, cfg.orbit_bound) for w in weights])
    if cfg.json:
        _emit({"schema": 1, "rows": rows})
        return EXIT_OK
    print(_HEADER)
    for row in rows:
        notes = []
        if row["flags"]:
            notes.append("q != d_l")
        if row["m"] is not None:
            notes.append(f"K(M) = {_group_str(row['type_of_M'])} at g={genus}, "
                         f"dim P = {row['dim_prym']}")
        print(_format_row(row, "; ".join(notes)))
    return EXIT_OK


# ---------------------------------------------------------------- verify

def _verify_row(key):
    family, rank, weight, bound = key
    rd = build_root_datum(family, rank)
    lam = fundamental_weight(rd, weight)
    cs = correspondence_set(rd, lam, bound=bound)
    rep = verify_identities(cs)
    return {
        "family": family, "rank": rank, "weight": weight, "d": cs.d,
        "identities": {c.name: {"passed": c.passed, "witness": c.witness} for c in rep},
        "gamma": list(gamma_group(rd, lam, od=cs.od).invariants),
        "psi_star_injective": psi_star_injective(cs.od),
    }


def _verify_keys(cfg):
    if cfg.suite == "paper":  # every reference row plus controls
        keys = []
        for ref in [*golden.invariant_rows(), *golden.type_rows()]:
            if ref.key not in keys:
                keys.append(ref.key)
        keys += [k for k in NEGATIVE_CONTROLS if k not in keys]
        typed = {ref.key for ref in golden.type_rows()}
        return keys, typed
    rd = cfg.selection()
    if cfg.all_weights or cfg.weight is None:
        return [(rd.family, rd.rank, w) for w in range(1, rd.rank + 1)], set()
    return [(rd.family, rd.rank, cfg.weight)], set()


def cmd_verify(cfg):
    keys, typed = _verify_keys(cfg)
    rows = _pmap(_verify_row, [(*k, cfg.orbit_bound) for k in keys])
    failures = []
    for row in rows:
        key = (row["family"], row["rank"], row["weight"])
        tag = f"{key[0]}{key[1]} w{key[2]}"
        for name, res in row["identities"].items():
            if not res["passed"]:
                failures.append(f"{tag} {name}: {res['witness']}")
        if key in typed:
            if row["gamma"]:
                failures.append(f"{tag}: orbit lattice quotient {_group_str(row['gamma'])} is not trivial")
            if not row["psi_star_injective"]:
                failures.append(f"{tag}: pullback is not injective")
        if key in NEGATIVE_CONTROLS and tuple(row["gamma"]) != NEGATIVE_CONTROLS[key]:
            failures.append(f"{tag}: control quotient {_group_str(row['gamma'])}, expected "
                            f"{_group_str(NEGATIVE_CONTROLS[key])}")
    if cfg.json:
        _emit({"schema": 1, "rows": rows, "failures": failures})
    else:
        for row in rows:
            ok = all(r["passed"] for r in row["identities"].values())
            print(f"{row['family']}{row['rank']:<3} w{row['weight']:<3} d={row['d']:<5} "
                  f"identities {'ok' if ok else 'FAIL'}  quotient {_group_str(row['gamma'])}  "
                  f"pullback {'injective' if row['psi_star_injective'] else 'not injective'}")
        print("all checks passed" if not failures else "\n".join(["FAILURES:", *failures]))
    return EXIT_MISMATCH if failures else EXIT_OK


# ---------------------------------------------------------------- polab

def cmd_polab_selftest(cfg):
    res = selftest(cfg.trials, cfg.seed, InstanceConfig())
    failures = [{"trial": t, "check": n, "witness": w} for t, n, w in res.failures]
    if cfg.json:
        _emit({"schema": 1, "trials": res.trials, "seed": cfg.seed,
               "divisible_checked": res.divisible_checked, "failures": failures})
    else:
        print(f"{res.trials} trials (seed {cfg.seed}), {res.divisible_checked} with a divisible "
              f"restriction, {len(failures)} failures")
        for f in failures:
            print(f"  trial {f['trial']}: {f['check']}: {f['witness']}")
    return EXIT_MISMATCH if failures else EXIT_OK


# ---------------------------------------------------------------- endtoend

def _endtoend_run(job):
    family, rank, weight, genus, seed, cover_json, bound, max_attempts = job
    rd = build_root_datum(family, rank)
    lam = fundamental_weight(rd, weight)
    od = orbit(rd, lam, bound)
    if cover_json is None:
        strategy = "search" if rd.weyl_order <= CERTIFY_LIMIT else "paired"
        cd = random_etale_cover(rd, genus, seed, od,
                                SearchConfig(max_attempts=max_attempts, strategy=strategy))
    else:
        cd = CoverDatum.from_json(cover_json)
    val = validate_cover(cd, rd, od)
    if not (val.relation_holds and val.transitive) or val.generation is False:
        raise CoverError(f"cover is not a connected W-cover (relation {val.relation_holds}, "
                         f"{val.n_components} components, generation {val.generation_status})")
    if not cd.is_etale:
        raise CoverError("only étale covers are supported")
    inv = curve_invariants(cd, od)
    cs = correspondence_set(rd, lam, bound=bound)
    hm = build_homology_model(cd, od)
    rep = end_to_end_type(hm, cs, endo_set(hm, cs))
    out = rep.to_json()
    del out["schema"]
    out.update(seed=seed, generation=val.generation_status, cover=cd.to_json(),
               dim_prym=inv.dim_prym, dim_P=inv.dim_P, ok=rep.ok)
    return out


def cmd_endtoend(cfg):
    rd = cfg.selection()
    if cfg.weight is None:
        raise UsageError("--weight is required")
    genus = cfg.genus or 2
    cover_json = None
    if cfg.monodromy:
        cd = load_cover(cfg.monodromy)
        if (cd.family, cd.rank) != (rd.family, rd.rank):
            raise UsageError(f"cover file is for {cd.family}{cd.rank}, selection is {rd.name}")
        genus = cd.genus
        cover_json = cd.to_json()
        seeds = [None]
    elif cfg.seeds:
        seeds = [int(s) for s in np.random.SeedSequence(cfg.seed).generate_state(cfg.seeds)]
    else:
        seeds = [cfg.seed]
    d = orbit(rd, fundamental_weight(rd, cfg.weight), cfg.orbit_bound).d
    h1 = 2 * (d * (genus - 1) + 1)
    if h1 > MAX_H1_RANK:
        raise UsageError(f"H1 rank {h1} exceeds the supported {MAX_H1_RANK}")
    jobs = [(rd.family, rd.rank, cfg.weight, genus, s, cover_json, cfg.orbit_bound,
             cfg.max_attempts) for s in seeds]
    runs = _pmap(_endtoend_run, jobs)
    bad = [r for r in runs if not r["ok"]]
    if cfg.json:
        _emit({"schema": 1, "family": rd.family, "rank": rd.rank, "weight": cfg.weight,
               "genus": genus, "runs": runs})
    else:
        for r in runs:
            src = "file" if r["seed"] is None else f"seed {r['seed']}"
            expected = _group_str([r["m_formula"]] * (2 * genus))
            print(f"{rd.name} w{cfg.weight} g={genus} {src}: g_Y={r['g_Y']} "
                  f"K(E|S)={_group_str(r['k_of_S'])} "
                  f"{'divisible' if r['divisible'] else 'NOT divisible'} by q={r['q']} "
                  f"K(M)={_group_str(r['type_of_M'])} expected {expected} "
                  f"{'match' if r['ok'] else 'MISMATCH'} (generation {r['generation']})")
    return EXIT_MISMATCH if bad else EXIT_OK


# ---------------------------------------------------------------- parser

def _selection_args(p, weight=True):
    p.add_argument("-f", "--family", help="Cartan type letter A-G")
    p.add_argument("-r", "--rank", type=int)
    if weight:
        p.add_argument("-w", "--weight", type=int, help="fundamental weight index (1-based)")
    p.add_argument("--orbit-bound", type=int, default=DEFAULT_ORBIT_BOUND)
    p.add_argument("--json", action="store_true")


def build_parser():
    p = _Parser(prog="rt", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    t = sub.add_parser("table", help="invariant table rows")
    _selection_args(t)
    t.add_argument("-g", "--genus", type=int)
    t.add_argument("--all-paper", action="store_true", help="all reference rows, diffed")

    v = sub.add_parser("verify", help="correspondence identities and lattice quotients")
    _selection_args(v)
    v.add_argument("--suite", choices=["paper"])
    v.add_argument("--all-weights", action="store_true")

    pol = sub.add_parser("polab", help="polarized lattice tools")
    polsub = pol.add_subparsers(dest="polab_command", required=True, parser_class=_Parser)
    st = polsub.add_parser("selftest", help="random instance property checks")
    st.add_argument("--trials", type=int, default=200)
    st.add_argument("--seed", type=int, default=0)
    st.add_argument("--json", action="store_true")

    e = sub.add_parser("endtoend", help="polarization type on a homology model")
    _selection_args(e)
    e.add_argument("-g", "--genus", type=int)
    e.add_argument("--seed", type=int, default=0)
    e.add_argument("--seeds", type=int, help="number of covers derived from --seed")
    e.add_argument("--monodromy", help="cover description (JSON)")
    e.add_argument("--max-attempts", type=int, default=20000)
    return p


_COMMANDS = {"table": cmd_table, "verify": cmd_verify, "endtoend": cmd_endtoend,
             "polab": cmd_polab_selftest}


def main(argv=None):
    try:
        ns = build_parser().parse_args(argv)
        cfg = RunConfig.from_namespace(ns)
        if cfg.command == "verify" and not cfg.suite and not cfg.family:
            raise UsageError("give --suite or a selection")
        if cfg.command == "table" and not cfg.all_paper and not cfg.family:
            raise UsageError("give --all-paper or a selection")
        return _COMMANDS[cfg.command](cfg)
    except UsageError as exc:
        print(f"rt: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except HomologyError as exc:
        print(f"rt: mismatch: {exc}", file=sys.stderr)
        return EXIT_MISMATCH
    except (PrymWeylError, ValueError, OSError) as exc:
        print(f"rt: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
