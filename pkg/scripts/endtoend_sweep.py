"""Run the end-to-end polarization-type computation over many seeded covers.

Prints one record per (type, weight) with the distinct K(M) types seen.  Cases
whose hypotheses fail (B2:1 by default) are controls: their self-checks must
still pass but the type need not match.
"""

import argparse
import json
import sys
from collections import Counter

import numpy as np

from prymweyl.corr import correspondence_set, invariant_report
from prymweyl.cover import random_etale_cover
from prymweyl.homology import build_homology_model, end_to_end_type, endo_set
from prymweyl.rootsys import build_root_datum, fundamental_weight
from prymweyl.weyl import orbit

DEFAULT_CASES = ["A2:1", "A3:1", "A4:2", "B2:1", "A5:1"]


def parse_case(text):
    name, weight = text.split(":")
    return name[0].upper(), int(name[1:]), int(weight)


def sweep(family, rank, weight, genus, seeds):
    rd = build_root_datum(family, rank)
    od = orbit(rd, fundamental_weight(rd, weight))
    cs = correspondence_set(rd, od.lam)
    hypotheses = invariant_report(rd, weight, genus, cs).hypotheses_hold
    seen, failures = Counter(), []
    for seed in seeds:
        hm = build_homology_model(random_etale_cover(rd, genus, seed, od), od)
        rep = end_to_end_type(hm, cs, endo_set(hm, cs))
        seen[tuple(x for x in rep.type_of_M if x > 1)] += 1
        ok = rep.ok if hypotheses else rep.identities_passed  # self-checks raise on failure
        if not ok:
            failures.append(seed)
    return {"case": f"{family}{rank}:{weight}", "genus": genus, "d": od.d, "q": str(cs.q),
            "hypotheses_hold": hypotheses, "types": {str(list(k)): v for k, v in seen.items()}, "failed_seeds": failures}


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("cases", nargs="*", default=DEFAULT_CASES, help="e.g. A4:2")
    p.add_argument("-g", "--genus", type=int, default=2)
    p.add_argument("-n", "--count", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    args = p.parse_args(argv)
    seeds = [int(s) for s in np.random.SeedSequence(args.seed).generate_state(args.count)]
    results = [sweep(*parse_case(c), args.genus, seeds) for c in args.cases]
    json.dump(results, sys.stdout, indent=2)
    print()
    return 1 if any(r["failed_seeds"] for r in results) else 0


if __name__ == "__main__":
    sys.exit(main())
