"""Command-line front end: ``python -m eqcsm <command>`` or ``eqcsm <command>``.

Exit codes: 0 success, 1 failed verification, 2 input error,
3 mathematical inconsistency, 4 heavy run refused.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from . import acceptance
from .csmcalc import (ConeClassSpec, HeavyRunRefused, Inconsistent, METHODS, Underdetermined,
                      omega1_local, projective_cone_class, scalar_cone_class)
from .grassloc import (GrassPoint, LocalClassTable, c1_power_template, gysin_schur, instantiate,
                       integrate, residue_integral, tangent_weights)
from .polyarith import MultiPoly, NotDivisible, NotPolynomial, _as_coef, parse_poly, to_text
from .positivity import NotTranslationInvariant, TreeBasis, change_basis, check_nonneg, is_positive_basis
from .symfunc import NotSymmetric, expand_schur, expand_two_alphabets, parse_partition, schur

CACHE_ENV = "EQCSM_CACHE_DIR"
EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_MATH, EXIT_HEAVY = 0, 1, 2, 3, 4


@dataclass
class RunConfig:
    cache_dir: Path | None = None
    workers: int = 1
    degree_cap: int | None = None
    output: str = "text"
    heavy: bool = False

    def __post_init__(self):
        if self.workers < 1:
            raise ValueError("workers must be at least 1")
        if self.output not in ("text", "json"):
            raise ValueError("output must be text or json")
        if self.cache_dir is not None:
            self.cache_dir = Path(self.cache_dir)
            self.cache_dir.mkdir(parents=True, exist_ok=True)

    @classmethod
    def from_args(cls, args) -> "RunConfig":
        cache = getattr(args, "cache_dir", None) or os.environ.get(CACHE_ENV) or None
        return cls(cache_dir=cache, workers=getattr(args, "workers", 1),
                   degree_cap=getattr(args, "degree_cap", None),
                   output="json" if getattr(args, "json", False) else "text",
                   heavy=getattr(args, "heavy", False))


class InputError(ValueError):
    pass


def _pair(text: str) -> tuple[int, int]:
    try:
        m, n = (int(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected m,n but got {text!r}")
    return m, n


def _ints(text: str) -> list[int]:
    return [int(x) for x in text.split(",") if x.strip()]


def _emit(cfg: RunConfig, text: str, data) -> None:
    if cfg.output == "json":
        print(json.dumps(data, indent=1, sort_keys=True))
    else:
        print(text)


def _poly_out(cfg: RunConfig, p: MultiPoly) -> None:
    _emit(cfg, to_text(p), p.to_json())


def _read_json(path: str):
    try:
        return json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read {path}: {exc}")


def _template(args, m: int) -> MultiPoly:
    if args.template is not None:
        return parse_poly(args.template, m, prefix="x")
    return c1_power_template(m, args.power)


# --- commands ---------------------------------------------------------------------

def cmd_integrate(args, cfg: RunConfig) -> int:
    m, n = args.grass
    if args.table:
        table = LocalClassTable.from_json(_read_json(args.table))
        if (table.m, table.n) != (m, n):
            raise InputError(f"table is for Grass_{table.m}(C^{table.n})")
    else:
        if args.volume:
            args.power = m * (n - m)
        if args.power is None and args.template is None:
            raise InputError("give one of --power, --volume, --template or --table")
        table = instantiate(_template(args, m), m, n)
    _poly_out(cfg, integrate(table, degree_cap=cfg.degree_cap, workers=cfg.workers))
    return EXIT_OK


def cmd_residue(args, cfg: RunConfig) -> int:
    m, n = args.grass
    if args.power is None and args.template is None:
        raise InputError("give --power or --template")
    _poly_out(cfg, residue_integral(_template(args, m), m, n))
    return EXIT_OK


def cmd_schur(args, cfg: RunConfig) -> int:
    vars_ = _ints(args.vars)
    nvars = args.nvars or max(vars_)
    _poly_out(cfg, schur(parse_partition(args.partition), vars_, nvars, negate=args.negate))
    return EXIT_OK


def cmd_expand(args, cfg: RunConfig) -> int:
    p = parse_poly(args.poly, args.nvars)
    if args.vars2:
        table = expand_two_alphabets(p, _ints(args.vars), _ints(args.vars2),
                                     negate_x=args.negate, negate_v=False)
    else:
        table = expand_schur(p, _ints(args.vars), negate=args.negate)
    lines = []
    for key, c in table.sorted_items():
        label = " ".join(part.label() for part in key)
        lines.append(f"{label}: {c}")
    _emit(cfg, "\n".join(lines) or "0", table.to_json())
    return EXIT_OK


def cmd_gysin(args, cfg: RunConfig) -> int:
    m, n = args.grass
    table = gysin_schur(parse_partition(args.J), parse_partition(args.K), m, n, strict=args.strict)
    if not table.entries:
        _emit(cfg, "0", table.to_json())
    else:
        (key, sign), = table.entries.items()
        _emit(cfg, f"{sign} * S_{key[0].label()}", table.to_json())
    return EXIT_OK


def _write(path: Path, data) -> None:
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_text(json.dumps(data, indent=1, sort_keys=True) + "\n")
    os.replace(tmp, path)


def cmd_omega1(args, cfg: RunConfig) -> int:
    if args.n >= 4 and not cfg.heavy:
        print(f"omega1 --n {args.n} is a heavy run (several minutes); add --heavy",
              file=sys.stderr)
        return EXIT_HEAVY
    res = omega1_local(args.n, args.method, cache_dir=cfg.cache_dir, workers=cfg.workers,
                       heavy=cfg.heavy)
    schur_table = res.schur_table()
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        _write(out / f"f_{args.n}.json", {"k": args.n, **res.f.to_json()})
        if args.n <= 3 or args.table:
            _write(out / "table.json", res.full_table().to_json())
        _write(out / "schur.json", schur_table.to_json())
    if args.quiet:
        return EXIT_OK
    if cfg.output == "json":
        _emit(cfg, "", {"n": args.n, "method": args.method, "f": res.f.to_json(),
                        "schur": schur_table.to_json()})
        return EXIT_OK
    comps = res.f.homogeneous_components()
    for d in sorted(comps):
        print(f"deg={d}: {to_text(comps[d])}")
    neg = schur_table.negative_entries()
    print(f"schur entries: {len(schur_table.entries)}, negative: {len(neg)}")
    return EXIT_OK


def cmd_cone(args, cfg: RunConfig) -> int:
    if args.a is not None:
        a = [_as_coef(x.strip()) for x in args.a.split(",")]
        _poly_out(cfg, scalar_cone_class(a, args.n or len(a)))
        return EXIT_OK
    if args.weights is None:
        raise InputError("give --a for a scalar cone or --weights for a projective cone")
    nv = args.nvars
    weights = [parse_poly(w, nv) for w in args.weights.split(",")]
    spec = ConeClassSpec(weights, parse_poly(args.b0, nv) if args.b0 else 0)
    _poly_out(cfg, projective_cone_class(spec))
    return EXIT_OK


def _load_class(path: str) -> tuple[MultiPoly, int | None]:
    data = _read_json(path)
    if "terms" not in data:
        raise InputError(f"{path} is not a polynomial file")
    return MultiPoly.from_json(data), data.get("k")


def cmd_positivity(args, cfg: RunConfig) -> int:
    p, k = _load_class(args.class_file)
    tree = TreeBasis.parse(args.tree, p.nvars)
    point = _ints(args.point) if args.point else (list(range(1, k + 1)) if k else None)
    basis_ok = None
    if point:
        basis_ok = is_positive_basis(tree, tangent_weights(GrassPoint(tuple(point), p.nvars)))
    report = check_nonneg(change_basis(p, tree))
    ok = report.ok and basis_ok is not False
    text = report.describe()
    if basis_ok is not None:
        text += f"\npositive basis at p{','.join(map(str, point))}: {'yes' if basis_ok else 'no'}"
    data = {"ok": ok, "positive_basis": basis_ok, "tree": str(tree),
            "negative_terms": [{"exp": list(e), "coef": str(c)} for e, c in report.offenders]}
    if not ok and not text.startswith("FAIL"):
        text = "FAIL\n" + text
    _emit(cfg, text, data)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_verify(args, cfg: RunConfig) -> int:
    if args.list:
        for name, desc in acceptance.SUITES.items():
            print(f"{name:14s} {desc}")
        return EXIT_OK
    heavy = cfg.heavy or acceptance.heavy_enabled()
    if args.suite == "heavy" and not heavy:
        print("the heavy suite needs --heavy or EQCSM_HEAVY=1", file=sys.stderr)
        return EXIT_HEAVY
    results = [acceptance.run_criterion(c) for c in acceptance.select(args.suite, heavy)]
    for r in results:
        print(r.line())
    failed = [r for r in results if not r.ok]
    print(f"{len(results) - len(failed)}/{len(results)} passed")
    return EXIT_OK if not failed else EXIT_FAIL


# --- parser -------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="eqcsm", description=(
        "Exact equivariant localization on Grassmannians and local CSM classes."))
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, workers=False):
        p.add_argument("--json", action="store_true", help="machine-readable output")
        if workers:
            p.add_argument("--workers", type=int, default=1)
        return p

    p = common(sub.add_parser("integrate", help="sum of local contributions over fixed points"),
               workers=True)
    p.add_argument("--grass", type=_pair, required=True, metavar="m,n")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--power", type=int, help="integrate c1(det R^*)^k")
    g.add_argument("--volume", action="store_true", help="integrate c1^dim")
    g.add_argument("--template", help="symmetric polynomial in x1..xm")
    g.add_argument("--table", help="LocalClassTable JSON file")
    p.add_argument("--degree-cap", type=int, default=None)
    p.set_defaults(func=cmd_integrate)

    p = common(sub.add_parser("residue", help="iterated residue at infinity"))
    p.add_argument("--grass", type=_pair, required=True, metavar="m,n")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--power", type=int)
    g.add_argument("--template")
    p.set_defaults(func=cmd_residue)

    p = common(sub.add_parser("schur", help="Schur polynomial"))
    p.add_argument("--partition", required=True, help="e.g. 21 or 2,1")
    p.add_argument("--vars", required=True, help="e.g. 1,2,3")
    p.add_argument("--nvars", type=int)
    p.add_argument("--negate", action="store_true")
    p.set_defaults(func=cmd_schur)

    p = common(sub.add_parser("expand", help="expand a symmetric polynomial in Schur functions"))
    p.add_argument("--poly", required=True)
    p.add_argument("--nvars", type=int, required=True)
    p.add_argument("--vars", required=True)
    p.add_argument("--vars2", help="second alphabet (plain sign)")
    p.add_argument("--negate", action="store_true", help="use S_I(-t) on the first alphabet")
    p.set_defaults(func=cmd_expand)

    p = common(sub.add_parser("gysin", help="integral of S_J(Q) S_K(R) over Grass_m(C^n)"))
    p.add_argument("--grass", type=_pair, required=True, metavar="m,n")
    p.add_argument("--J", required=True)
    p.add_argument("--K", default="0")
    p.add_argument("--strict", action="store_true", help="refuse pairs outside j_(n-m) - m >= k_1")
    p.set_defaults(func=cmd_gysin)

    p = common(sub.add_parser("omega1", help="local CSM class of Omega_1(n)"), workers=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--method", choices=METHODS, default="direct")
    p.add_argument("--out", help="directory for f_n.json, table.json, schur.json")
    p.add_argument("--cache-dir", help=f"f_k cache (default ${CACHE_ENV})")
    p.add_argument("--heavy", action="store_true", help="allow n >= 4")
    p.add_argument("--table", action="store_true", help="also write table.json for n >= 4")
    p.add_argument("--quiet", action="store_true")
    p.set_defaults(func=cmd_omega1)

    p = common(sub.add_parser("cone", help="cone class formulas"))
    p.add_argument("--a", help="scalar case: coefficients a_0..a_{n-1} of P(X) in powers of h")
    p.add_argument("--n", type=int)
    p.add_argument("--weights", help="projective case: comma-separated weights")
    p.add_argument("--nvars", type=int, default=1)
    p.add_argument("--b0", help="b_0(t) for the projective case")
    p.set_defaults(func=cmd_cone)

    p = common(sub.add_parser("positivity", help="nonnegativity in a spanning-tree basis"))
    p.add_argument("--class", dest="class_file", required=True, help="polynomial JSON (e.g. f_2.json)")
    p.add_argument("--tree", required=True, help='e.g. "1>2,2>4,4>3"')
    p.add_argument("--point", help="fixed point whose tangent weights must be positive")
    p.set_defaults(func=cmd_positivity)

    p = sub.add_parser("verify", help="run acceptance suites")
    p.add_argument("suite", nargs="?", default="all")
    p.add_argument("--list", action="store_true")
    p.add_argument("--heavy", action="store_true")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = RunConfig.from_args(args)
        return args.func(args, cfg)
    except HeavyRunRefused as exc:
        print(f"refused: {exc}", file=sys.stderr)
        return EXIT_HEAVY
    except (NotPolynomial, Inconsistent, Underdetermined, NotDivisible) as exc:
        print(f"inconsistent: {exc}", file=sys.stderr)
        return EXIT_MATH
    except (InputError, NotSymmetric, NotTranslationInvariant, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
