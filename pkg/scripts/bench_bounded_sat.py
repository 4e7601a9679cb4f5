"""Time the bounded transitive check on sampled NO instances of the pipeline.

    python scripts/bench_bounded_sat.py --sample 300 --seed 1

Reports mean and worst time per world count.
"""

import argparse
import collections
import random
import time

from modaltw import kripke as K
from modaltw import reductions as R


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sample", type=int, default=300)
    ap.add_argument("--seed", type=int, default=1)
    args = ap.parse_args()

    insts = list(R.nlcp_corpus())
    rng = random.Random(args.seed)
    per_n = collections.defaultdict(list)
    for inst in rng.sample(insts, min(args.sample, len(insts))):
        pw, _, phi = R.prepare_pipeline(inst)
        if R.pwsat_witness(pw) is not None:
            continue
        t = time.perf_counter()
        got = K.bounded_sat(phi.cnf, K.TRANSITIVE, pw.n + 1)
        per_n[pw.n + 1].append(time.perf_counter() - t)
        assert isinstance(got, K.NoModelUpTo), "NO instance with a transitive model"

    print(f"{'worlds':>6} {'count':>6} {'mean s':>8} {'max s':>8}")
    for n in sorted(per_n):
        ts = per_n[n]
        print(f"{n:>6} {len(ts):>6} {sum(ts) / len(ts):>8.3f} {max(ts):>8.3f}")


if __name__ == "__main__":
    main()
