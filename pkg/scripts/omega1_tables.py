"""Print f_n and its Schur table for Omega_1(n), n = 1..3, with all methods compared.

    python3 scripts/omega1_tables.py [--max-n 3] [--out DIR]
"""

import argparse
import json
import time
from pathlib import Path

from eqcsm.csmcalc import METHODS, euler_characteristic, omega1_local
from eqcsm.polyarith import to_text


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--max-n", type=int, default=3)
    ap.add_argument("--out", type=Path)
    args = ap.parse_args()
    for n in range(1, args.max_n + 1):
        results = {}
        for method in METHODS:
            start = time.perf_counter()
            results[method] = omega1_local(n, method)
            print(f"n={n} {method:8s} {time.perf_counter() - start:6.2f}s")
        res = results["direct"]
        agree = all(r.f == res.f for r in results.values())
        print(f"n={n}: methods agree: {agree}; chi = {euler_characteristic(res.full_table())}")
        for d, part in sorted(res.f.homogeneous_components().items()):
            text = to_text(part)
            print(f"  deg={d}: {text if len(text) < 100 else text[:97] + '...'}")
        table = res.schur_table()
        print(f"  schur entries: {len(table.entries)}, negative: {len(table.negative_entries())}")
        for key, c in table.sorted_items():
            print(f"    a[{key[0].label()},{key[1].label()}] = {c}")
        if args.out:
            args.out.mkdir(parents=True, exist_ok=True)
            (args.out / f"schur_{n}.json").write_text(json.dumps(table.to_json(), indent=1) + "\n")


if __name__ == "__main__":
    main()
