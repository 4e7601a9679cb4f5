"""Exhaustive reduction-pipeline run over all small NLCP instances.

    python scripts/run_pipeline.py [--max-vertices 4] [--json out.json]

Prints a tally of YES/NO instances, failures, the smallest slack between the
layout width and its bound, and the wall time.
"""

import argparse
import collections
import json
import sys
import time
from dataclasses import asdict, dataclass, field

from modaltw import reductions as R


@dataclass
class PipelineSummary:
    instances: int = 0
    yes: int = 0
    no: int = 0
    failed: list = field(default_factory=list)
    min_slack: int | None = None
    slowest: float = 0.0
    seconds: float = 0.0


def run(max_vertices: int = 4, progress: int = 0) -> PipelineSummary:
    out = PipelineSummary()
    start = time.monotonic()
    for i, inst in enumerate(R.nlcp_corpus(max_vertices)):
        t = time.monotonic()
        rep = R.verify_pipeline(inst)
        out.slowest = max(out.slowest, time.monotonic() - t)
        out.instances += 1
        if rep.pwsat_yes:
            out.yes += 1
        else:
            out.no += 1
        if not rep.ok:
            out.failed.append({"instance": R.nlcp_to_json(inst), "failures": rep.failures()})
        slack = rep.layout_bound - rep.layout_width
        out.min_slack = slack if out.min_slack is None else min(out.min_slack, slack)
        if progress and i % progress == 0:
            print(f"{i:6d}  {time.monotonic() - start:8.1f}s", file=sys.stderr, flush=True)
    out.seconds = time.monotonic() - start
    return out


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--max-vertices", type=int, default=4)
    ap.add_argument("--progress", type=int, default=2000, help="report every N instances (0: quiet)")
    ap.add_argument("--json", help="write the summary here")
    args = ap.parse_args()
    s = run(args.max_vertices, args.progress)
    counts = collections.Counter(ok=s.instances - len(s.failed), failed=len(s.failed))
    print(f"instances {s.instances}  yes {s.yes}  no {s.no}  {dict(counts)}")
    print(f"min width slack {s.min_slack}  slowest {s.slowest:.2f}s  total {s.seconds:.1f}s")
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(asdict(s), fh, indent=2)
    return 0 if not s.failed else 1


if __name__ == "__main__":
    sys.exit(main())
