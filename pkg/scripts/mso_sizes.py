"""Node counts of the MSO sentences as modal depth grows.

    python scripts/mso_sizes.py [--max-md 6]

xi and zeta grow by a fixed step per level; the chi variants have no depth
parameter at all.
"""

import argparse

from modaltw import mso as M


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--max-md", type=int, default=6)
    args = ap.parse_args()

    print(f"{'md':>3} {'xi':>6} {'zeta':>6}  so-nesting(xi)")
    prev = None
    for md in range(args.max_md + 1):
        xi = M.stats(M.build_xi_sentence(md))
        zeta = M.stats(M.build_zeta_sentence(md))
        step = "" if prev is None else f"  (+{xi.node_count - prev})"
        print(f"{md:>3} {xi.node_count:>6} {zeta.node_count:>6}  {xi.so_nesting}{step}")
        prev = xi.node_count
    for variant in M.CHI_VARIANTS:
        st = M.stats(M.build_chi_family(variant))
        print(f"chi[{variant}] {st.node_count} nodes, {st.so_quantifier_count} set quantifiers")


if __name__ == "__main__":
    main()
