"""Omega_1(4) by grouped summation: timing, Schur negativity and a positive tree basis.

Takes a few minutes.  Lower levels are cached in --cache-dir.

    python3 scripts/omega1_n4.py [--cache-dir DIR] [--out DIR]
"""

import argparse
import json
import resource
import time
from pathlib import Path

from eqcsm.csmcalc import omega1_base_point, omega1_local, store_cached
from eqcsm.grassloc import tangent_weights
from eqcsm.positivity import TreeBasis, change_basis, check_nonneg, is_positive_basis


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--cache-dir", type=Path, default=Path("omega1-cache"))
    ap.add_argument("--out", type=Path)
    ap.add_argument("--tree", default="1>2,2>3,3>4,4>5,5>6,6>7,7>8")
    args = ap.parse_args()

    start = time.perf_counter()
    res = omega1_local(4, "grouped", cache_dir=args.cache_dir, heavy=True)
    elapsed = time.perf_counter() - start
    rss = resource.getrusage(resource.RUSAGE_SELF).ru_maxrss / 1024
    print(f"f_4: {len(res.f)} monomials in {elapsed:.1f}s, peak RSS {rss:.0f} MB")
    store_cached(args.cache_dir, 4, res.f)

    table = res.schur_table()
    neg = table.negative_entries()
    print(f"schur entries: {len(table.entries)}, negative: {len(neg)}")
    for key, c in sorted(neg.items()):
        print(f"  a[{key[0].label()},{key[1].label()}] = {c}")

    tree = TreeBasis.parse(args.tree, 8)
    positive = is_positive_basis(tree, tangent_weights(omega1_base_point(4)))
    report = check_nonneg(change_basis(res.f, tree))
    print(f"tree {tree}: {'positive basis' if positive else 'not a positive basis'}; "
          f"coefficients {report.describe()}")
    if args.out:
        args.out.mkdir(parents=True, exist_ok=True)
        (args.out / "schur_4.json").write_text(json.dumps(table.to_json(), indent=1) + "\n")


if __name__ == "__main__":
    main()
