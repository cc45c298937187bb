"""Compare k-consistency closures with width-k refutations on random instances.

    python3 scripts/closure_vs_nhr.py --instances 1000 --seed 1
"""

import argparse
import random
import sys
from itertools import product

from localsat.consistency import k_consistency_closure
from localsat.csp import Constraint, CspInstance
from localsat.encode import direct_encode
from localsat.hyperres import refute_width_k


def random_instance(rng, n_max, d_max):
    n = rng.randint(1, n_max)
    names = [f"v{i}" for i in range(n)]
    doms = {v: tuple(range(rng.randint(1, d_max))) for v in names}
    cons = []
    for _ in range(rng.randint(0, 6)):
        scope = rng.sample(names, rng.randint(1, min(3, n)))
        p = rng.uniform(0.3, 0.9)
        cons.append(Constraint(scope, [t for t in product(*(doms[v] for v in scope)) if rng.random() < p]))
    return CspInstance(names, doms, cons)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--instances", type=int, default=500)
    ap.add_argument("--n-max", type=int, default=5)
    ap.add_argument("--d-max", type=int, default=3)
    ap.add_argument("--k", default="1,2,3")
    ap.add_argument("--seed", type=int, default=1)
    args = ap.parse_args(argv)
    rng = random.Random(args.seed)
    ks = [int(k) for k in args.k.split(",")]
    table = {(k, e): 0 for k in ks for e in (False, True)}
    bad = 0
    for _ in range(args.instances):
        inst = random_instance(rng, args.n_max, args.d_max)
        for k in ks:
            empty = k_consistency_closure(inst, k, trace=False).empty
            table[(k, empty)] += 1
            for amo in (True, False):
                cnf, _ = direct_encode(inst, amo)
                bad += refute_width_k(cnf, k).refuted != empty
    for k in ks:
        print(f"k={k}: empty={table[(k, True)]} non-empty={table[(k, False)]}")
    print(f"disagreements: {bad}")
    return 1 if bad else 0


if __name__ == "__main__":
    sys.exit(main())
