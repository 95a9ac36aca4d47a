"""Local equivariant CSM classes: anchors, recovery from localization, GKM, cones.

The running example is the codimension-one Schubert variety Omega_1(n) in
Grass_n(C^{2n}), the subspaces meeting <e_1..e_n>.  Near p_{1..n} it is the
determinant hypersurface in Hom(C^n, C^n).  Its local class f_n is a
polynomial in u = (t_1..t_n) and v = (t_{n+1}..t_{2n}).
"""

from __future__ import annotations

import json
import logging
import os
import tempfile
from dataclasses import dataclass, field
from functools import lru_cache
from fractions import Fraction
from math import comb
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .grassloc import (GKMGraph, GrassPoint, LocalClassTable, euler_class, fixed_points,
                       gkm_graph, nest_by_membership, tangent_weights)
from .polyarith import (Coef, FractionTerm, LinearForm, MultiPoly, NotDivisible, NotPolynomial,
                        elementary_symmetric, exact_div_linear, product, sum_by_degree)

log = logging.getLogger(__name__)

FORMAT_VERSION = 1
HEAVY_FROM = 4


class Inconsistent(ArithmeticError):
    """Input classes admit no solution."""


class Underdetermined(ArithmeticError):
    """A congruence system has more than one solution in some degree."""


class HeavyRunRefused(RuntimeError):
    pass


def _as_poly(w, nvars: int | None = None) -> MultiPoly:
    if isinstance(w, LinearForm):
        return w.to_poly()
    if isinstance(w, MultiPoly):
        return w
    return MultiPoly.const(nvars or 1, w)


# --- smooth points and anchors -------------------------------------------------

def smooth_local_class(tangent: Sequence[LinearForm], normal: Sequence[LinearForm]) -> MultiPoly:
    """prod(normal weights) * prod(1 + tangent weights)."""
    forms = list(tangent) + list(normal)
    if not forms:
        raise ValueError("no weights given")
    n = forms[0].nvars
    out = product((w.to_poly() for w in normal), n)
    for w in tangent:
        out = out * (w.to_poly() + 1)
    return out


def degree_zero_anchor(p: GrassPoint, member: bool) -> MultiPoly:
    """Top-degree part of the local class: e_p inside X, zero outside."""
    return euler_class(p) if member else MultiPoly.zero(p.n)


# --- recovery by localization --------------------------------------------------

def _others(known: LocalClassTable, p0: GrassPoint) -> list[GrassPoint]:
    pts = [p for p in fixed_points(known.m, known.n) if p != p0]
    missing = [p for p in pts if p not in known]
    if missing:
        raise ValueError(f"no class given at {', '.join(map(str, missing))}")
    return pts


def _summand(known: LocalClassTable, p0: GrassPoint, p: GrassPoint) -> FractionTerm:
    return FractionTerm.ratio(known[p], tangent_weights(p0), tangent_weights(p))


@dataclass(frozen=True)
class AtZero:
    """A summand with t_var set to 0, for translation-invariant sums.

    A function of differences t_j - t_i is recovered from its value at
    t_var = 0 by t_i -> t_i - t_var, so one variable drops out of the
    expensive summation.  No denominator form may be a multiple of t_var.
    """

    leaf: object
    var: int = 1

    @property
    def nvars(self) -> int:
        return self.leaf.nvars

    def degree_part(self, d: int) -> FractionTerm:
        return _term_at_zero(self.leaf.degree_part(d), self.var)


def _form_at_zero(f: LinearForm, var: int) -> LinearForm:
    c = list(f.coeffs)
    c[var - 1] = 0
    return LinearForm(tuple(c))


def _term_at_zero(t: FractionTerm, var: int) -> FractionTerm:
    forms = [_form_at_zero(f, var) for f, m in t.denominator for _ in range(m)]
    out = FractionTerm.make(t.numerator.set_zero(var), forms)
    return FractionTerm(out.numerator, out.denominator, out.sign * t.sign)


def at_zero(leaf, var: int = 1):
    """Leaf with t_var = 0; leaves that can restrict themselves do so up front."""
    if hasattr(leaf, "at_zero"):
        return leaf.at_zero(var)
    return AtZero(leaf, var)


def lift_from_zero(q: MultiPoly, var: int = 1) -> MultiPoly:
    """The translation-invariant p with p|_{t_var = 0} = q."""
    n = q.nvars
    tv = MultiPoly.var(n, var)
    images = [MultiPoly.var(n, i) - tv if i != var else MultiPoly.zero(n) for i in range(1, n + 1)]
    return q.substitute(images)


def remainder_from_summands(summands: Mapping[GrassPoint, object], nvars: int,
                            degrees: Iterable[int],
                            groups: Sequence[Sequence[GrassPoint]] | None = None,
                            workers: int = 1,
                            translation_invariant: bool = False) -> dict[int, MultiPoly]:
    """Degree parts of -sum of the given summands (FractionTerms or lazy leaves).

    With ``groups`` every group is summed and certified on its own before
    the groups are added.  ``translation_invariant`` promises that every
    summand is a function of differences t_j - t_i; the sum then runs at
    t_1 = 0 and is lifted back.
    """
    degrees = list(degrees)
    out = {d: MultiPoly.zero(nvars) for d in degrees}
    pts = sorted(summands)
    if not pts:
        return out
    if translation_invariant:
        leaf = lambda p: at_zero(summands[p])
    else:
        leaf = summands.__getitem__
    if groups is None:
        plans = [nest_by_membership(pts, leaf)]
    else:
        keep = set(pts)
        covered = {p for g in groups for p in g}
        if not keep <= covered:
            raise ValueError("groups do not cover every point")
        plans = [nest_by_membership([p for p in g if p in keep], leaf)
                 for g in groups if any(p in keep for p in g)]
    for i, plan in enumerate(plans):
        for d, part in sum_by_degree(plan, degrees, workers=workers).items():
            out[d] = out[d] - part
        log.debug("group %d of %d summed", i + 1, len(plans))
    if translation_invariant:
        out = {d: lift_from_zero(p) for d, p in out.items()}
    return out


def localization_remainder(known: LocalClassTable, p0: GrassPoint, degrees: Iterable[int],
                           groups: Sequence[Sequence[GrassPoint]] | None = None,
                           workers: int = 1) -> dict[int, MultiPoly]:
    """Degree parts of -sum_{p != p0} e_{p0}/e_p * c_p.

    Below the top degree this is the class at p0.
    """
    summands = {p: _summand(known, p0, p) for p in _others(known, p0) if not known[p].is_zero()}
    return remainder_from_summands(summands, known.n, degrees, groups, workers)


def _assemble(parts: Mapping[int, MultiPoly], p0: GrassPoint, member: bool, top: int,
              codim: int | None) -> MultiPoly:
    if codim is not None:
        bad = [d for d in range(min(codim, top)) if not parts[d].is_zero()]
        if bad:
            raise Inconsistent(f"nonzero parts below codimension {codim} in degrees {bad}")
    out = degree_zero_anchor(p0, member)
    for d in range(top):
        out = out + parts[d]
    return out


def recover_local_class(known: LocalClassTable, p0: GrassPoint, member: bool,
                        codim: int | None = None, workers: int = 1,
                        groups: Sequence[Sequence[GrassPoint]] | None = None) -> MultiPoly:
    """Class at p0 from the classes at every other fixed point.

    Degrees below dim Grass come from the localization remainder, the top
    degree from the anchor.  Parts below ``codim`` must vanish.
    """
    top = known.dimension
    parts = localization_remainder(known, p0, range(top), groups, workers)
    return _assemble(parts, p0, member, top, codim)


def raw_top_degree(known: LocalClassTable, p0: GrassPoint) -> MultiPoly:
    """The localization remainder in the top degree, which is not the class there."""
    top = known.dimension
    return localization_remainder(known, p0, [top])[top]


def euler_characteristic(table: LocalClassTable) -> Coef:
    """sum_p (top part of c_p) / e_p."""
    top = table.dimension
    tops = LocalClassTable(table.m, table.n,
                           {p: c.homogeneous_component(top) for p, c in table.classes.items()})
    from .grassloc import integrate
    value = integrate(tops)
    if value.degree() > 0:
        raise NotPolynomial("Euler characteristic is not a constant")
    return value.constant_term()


def degreewise_residuals(table: LocalClassTable) -> dict[int, MultiPoly]:
    """{d: sum_p (c_p)_d / e_p} for d below the top degree; all should vanish."""
    top = table.dimension
    missing = [p for p in fixed_points(table.m, table.n) if p not in table]
    if missing:
        raise ValueError(f"no class given at {', '.join(map(str, missing))}")
    pts = table.points()
    plan = nest_by_membership(pts, lambda p: FractionTerm.make(table[p], tangent_weights(p)))
    return sum_by_degree(plan, range(-top, 0))


# --- GKM -----------------------------------------------------------------------

def _reduce_form(w: LinearForm, j: int, i: int) -> LinearForm | None:
    c = list(w.coeffs)
    c[i - 1] += c[j - 1]
    c[j - 1] = 0
    return LinearForm(tuple(c)) if any(c) else None


def _edge_vars(w: LinearForm) -> tuple[int, int]:
    """(j, i) for w = t_j - t_i."""
    nz = [(k + 1, c) for k, c in enumerate(w.coeffs) if c]
    if len(nz) != 2 or sorted(c for _, c in nz) != [-1, 1]:
        raise ValueError(f"edge label {w} is not a character difference")
    j = next(k for k, c in nz if c == 1)
    i = next(k for k, c in nz if c == -1)
    return j, i


def _crt_degree(edges: list[tuple[LinearForm, MultiPoly]], d: int, nvars: int) -> MultiPoly:
    # Newton form: P = Q_1 + w_1 S_2 + w_1 w_2 S_3 + ...
    w0, q0 = edges[0]
    P = q0.homogeneous_component(d)
    for k in range(1, len(edges)):
        w, q = edges[k]
        j, i = _edge_vars(w)
        R = (q.homogeneous_component(d) - P).specialize(j, i)
        if R.is_zero():
            continue
        S = R
        for wp, _ in edges[:k]:
            red = _reduce_form(wp, j, i)
            if red is None:
                raise Underdetermined(f"labels {wp} and {w} are proportional")
            try:
                S = exact_div_linear(S, red)
            except NotDivisible:
                raise Inconsistent(f"degree {d}: no class is congruent to all neighbours")
        P = P + product((wp.to_poly() for wp, _ in edges[:k]), nvars) * S
    return P


def _linear_degree(edges: list[tuple[LinearForm, MultiPoly]], d: int, nvars: int) -> MultiPoly:
    from itertools import combinations_with_replacement

    from sympy import QQ
    from sympy.polys.matrices import DomainMatrix

    monos = []
    for combo in combinations_with_replacement(range(nvars), d):
        e = [0] * nvars
        for v in combo:
            e[v] += 1
        monos.append(tuple(e))
    rows: list[list] = []
    rhs: list = []
    for w, q in edges:
        j, i = _edge_vars(w)
        target = q.homogeneous_component(d).specialize(j, i).terms
        images = [MultiPoly.from_terms(nvars, {m: 1}).specialize(j, i) for m in monos]
        keys = sorted(set(target) | {k for im in images for k in im.terms})
        for key in keys:
            rows.append([QQ(Fraction(im.terms.get(key, 0))) for im in images])
            rhs.append(QQ(Fraction(target.get(key, 0))))
    ncols = len(monos)
    aug = DomainMatrix([r + [b] for r, b in zip(rows, rhs)], (len(rows), ncols + 1), QQ)
    rref, pivots = aug.rref()
    if ncols in pivots:
        raise Inconsistent(f"degree {d}: no class is congruent to all neighbours")
    if len(pivots) < ncols:
        raise Underdetermined(f"degree {d}: {ncols - len(pivots)} free parameters")
    mat = rref.to_Matrix()
    sol = {}
    for r, c in enumerate(pivots):
        val = Fraction(int(mat[r, ncols].p), int(mat[r, ncols].q))
        if val:
            sol[monos[c]] = val
    return MultiPoly.from_terms(nvars, sol)


def gkm_solve(graph: GKMGraph, known: LocalClassTable, p0: GrassPoint, member: bool,
              solver: str = "crt") -> MultiPoly:
    """The class at p0 from its GKM neighbours' classes.

    For each edge with label w the answer is congruent to the neighbour's
    class modulo w.  Degrees below dim Grass are determined by these
    congruences; the top degree is the anchor.
    """
    if solver not in ("crt", "linear"):
        raise ValueError(f"unknown solver {solver!r}")
    top = graph.m * (graph.n - graph.m)
    edges = [(w, known[q]) for q, w in graph.incident(p0)]
    if not edges:
        raise ValueError(f"{p0} has no neighbours")
    step = _crt_degree if solver == "crt" else _linear_degree
    out = degree_zero_anchor(p0, member)
    for d in range(top):
        out = out + step(edges, d, graph.n)
    return out


# --- cones ---------------------------------------------------------------------

@dataclass
class ConeClassSpec:
    """A torus-invariant cone X in a representation V.

    ``weights`` are the weights of V, ``b0`` the coefficient b_0(t) of the
    class of P(X) written in powers of h; ``scalar`` is the character by
    which the scalar circle acts, when there is one.
    """

    weights: list
    b0: MultiPoly | Coef = 0
    scalar: MultiPoly | None = None

    def __post_init__(self):
        if not self.weights:
            raise ValueError("need at least one weight")
        nv = self.nvars
        polys = [_as_poly(w, nv) for w in self.weights]
        if any(p.is_zero() for p in polys):
            raise ValueError("weights must be nonzero")
        self.weights = polys
        self.b0 = _as_poly(self.b0, nv)

    @property
    def nvars(self) -> int:
        for w in self.weights:
            if isinstance(w, (MultiPoly, LinearForm)):
                return w.nvars
        return 1


def projective_cone_class(spec: ConeClassSpec) -> MultiPoly:
    """b_0(t) + e_0 with e_0 the product of the weights of V."""
    e0 = product(spec.weights, spec.nvars)
    if spec.b0.degree() >= len(spec.weights):
        raise ValueError("b0 must have degree below dim V")
    return spec.b0 + e0


def scalar_cone_class(a: Sequence[Coef], n: int) -> MultiPoly:
    """sum a_i t^i + t^n for scalar weight t on C^n.

    ``a_i`` is the coefficient of h^i in the class of P(X) in P^{n-1}.
    """
    if len(a) != n:
        raise ValueError(f"need {n} coefficients, got {len(a)}")
    t = MultiPoly.var(1, 1)
    out = t ** n
    for i, c in enumerate(a):
        out = out + (t ** i).scale(c)
    return out


def h_reduce(p: Mapping[int, MultiPoly | Coef], weights: Sequence) -> dict[int, MultiPoly]:
    """Reduce sum_k p[k] h^k modulo prod (h + w_i) to h-degree below n."""
    ws = [_as_poly(w) for w in weights]
    nv = ws[0].nvars
    n = len(ws)
    sig = elementary_symmetric(ws, nv)
    coeffs = {k: _as_poly(c, nv) for k, c in p.items()}
    top = max(coeffs, default=-1)
    for k in range(top, n - 1, -1):
        c = coeffs.pop(k, None)
        if c is None or c.is_zero():
            continue
        # h^k = -sum_i sigma_i h^(k-i)
        for i in range(1, n + 1):
            coeffs[k - i] = coeffs.get(k - i, MultiPoly.zero(nv)) - c * sig[i]
    return {k: c for k, c in sorted(coeffs.items()) if not c.is_zero()}


def h_inverse(weights: Sequence) -> tuple[dict[int, MultiPoly], MultiPoly]:
    """h^{-1} = -sum_i sigma_{n-i}/sigma_n h^{i-1}, as (numerators, sigma_n)."""
    ws = [_as_poly(w) for w in weights]
    n = len(ws)
    sig = elementary_symmetric(ws, ws[0].nvars)
    return {i - 1: -sig[n - i] for i in range(1, n + 1)}, sig[n]


def h_substitution(a: Sequence, t: MultiPoly | None = None) -> list[MultiPoly]:
    """b with sum_j b_j h^j = sum_i a_i (h + t)^i."""
    if t is None:
        t = MultiPoly.var(1, 1)
    nv = t.nvars
    b = [MultiPoly.zero(nv) for _ in range(len(a))]
    for i, ai in enumerate(a):
        ai = _as_poly(ai, nv)
        for j in range(i + 1):
            b[j] = b[j] + ai * (t ** (i - j)).scale(comb(i, j))
    return b


# --- Omega_1(n) ----------------------------------------------------------------

def omega1_base_point(n: int) -> GrassPoint:
    return GrassPoint(tuple(range(1, n + 1)), 2 * n)


def omega1_level(p: GrassPoint, n: int) -> int:
    """k = |I & {1..n}|; the point lies in Omega_1(n) iff k >= 1."""
    return sum(1 for i in p.subset if i <= n)


def omega1_stratum_class(p: GrassPoint, n: int, f_table: Mapping[int, MultiPoly]) -> MultiPoly:
    """Local class of Omega_1(n) at p_I, |I & {1..n}| = k < n.

    The germ is Omega_1(k) times a smooth factor: f_k in u = t_A, v = t_B'
    (A = I & {1..n}, B' = {n+1..2n} - I) times (1 + w) for every other
    tangent weight.
    """
    nv = 2 * n
    if p.n != nv:
        raise ValueError(f"{p} is not a point of Grass_{n}(C^{nv})")
    A = [i for i in p.subset if i <= n]
    k = len(A)
    if k == 0:
        return MultiPoly.zero(nv)
    if k == n:
        raise ValueError("the base point is the unknown, not a stratum point")
    base, smooth = _stratum_parts(p, n, f_table)
    return StratumSummand(base, smooth, FractionTerm(MultiPoly.const(nv, 1))).full()


def omega1_known_table(n: int, f_table: Mapping[int, MultiPoly]) -> LocalClassTable:
    """Classes at every fixed point except the base point."""
    p0 = omega1_base_point(n)
    table = LocalClassTable(n, 2 * n)
    for p in fixed_points(n, 2 * n):
        if p != p0:
            table[p] = omega1_stratum_class(p, n, f_table)
    return table


@lru_cache(maxsize=256)
def _elementary(forms: tuple[LinearForm, ...]) -> list[MultiPoly]:
    return elementary_symmetric([w.to_poly() for w in forms], forms[0].nvars)


@dataclass(frozen=True)
class StratumSummand:
    """e_{p0}/e_p * c_p with c_p = base * prod(1 + w), built one degree at a time.

    Expanding prod(1 + w) for a dozen weights in eight variables is the
    expensive part of a heavy run, so only the requested degree is formed.
    """

    base: MultiPoly
    smooth: tuple[LinearForm, ...]
    prefactor: FractionTerm

    @property
    def nvars(self) -> int:
        return self.base.nvars

    def degree_part(self, d: int) -> FractionTerm:
        pre = self.prefactor
        want = d + pre.den_degree() - pre.numerator.degree()
        e = _elementary(self.smooth) if self.smooth else [MultiPoly.const(self.nvars, 1)]
        num = MultiPoly.zero(self.nvars)
        for j, part in self.base.homogeneous_components().items():
            if 0 <= want - j < len(e):
                num = num + part * e[want - j]
        return FractionTerm(num * pre.numerator, pre.denominator, pre.sign)

    def at_zero(self, var: int) -> "StratumSummand":
        """The same summand with t_var = 0, so every product runs with one variable fewer."""
        return StratumSummand(self.base.set_zero(var),
                              tuple(_form_at_zero(w, var) for w in self.smooth),
                              _term_at_zero(self.prefactor, var))

    def full(self) -> MultiPoly:
        out = self.base
        for w in self.smooth:
            out = out * (w.to_poly() + 1)
        return out


def _stratum_parts(p: GrassPoint, n: int, f_table: Mapping[int, MultiPoly]):
    nv = 2 * n
    A = [i for i in p.subset if i <= n]
    Bp = [j for j in range(n + 1, nv + 1) if j not in p.subset]
    k = len(A)
    if k not in f_table:
        raise KeyError(f"f_{k} is not known")
    base = f_table[k].embed(nv, A + Bp)
    smooth = tuple(LinearForm.diff(nv, j, i) for i in p.subset for j in p.complement
                   if not (i in A and j in Bp))
    return base, smooth


def omega1_summands(n: int, f_table: Mapping[int, MultiPoly]) -> dict[GrassPoint, StratumSummand]:
    """Lazy summands e_{p0}/e_p * c_p for every point of Omega_1(n) but the base point."""
    p0 = omega1_base_point(n)
    w0 = tangent_weights(p0)
    out = {}
    for p in fixed_points(n, 2 * n):
        if p == p0 or omega1_level(p, n) == 0:
            continue
        base, smooth = _stratum_parts(p, n, f_table)
        pre = FractionTerm.ratio(MultiPoly.const(2 * n, 1), w0, tangent_weights(p))
        out[p] = StratumSummand(base, smooth, pre)
    return out


def omega1_groups(n: int) -> list[list[GrassPoint]]:
    """Fixed points other than the base point, grouped by k = 1..n-1.

    Inside a group the points are ordered by I & {n+1..2n} first, so that
    nested summation runs over A for fixed B (Fubini).
    """
    p0 = omega1_base_point(n)
    groups = []
    for k in range(1, n):
        pts = [p for p in fixed_points(n, 2 * n) if p != p0 and omega1_level(p, n) == k]
        pts.sort(key=lambda p: ([i for i in p.subset if i > n], p.subset))
        groups.append(pts)
    return groups


@dataclass
class Omega1Result:
    n: int
    method: str
    f: MultiPoly
    lower: dict[int, MultiPoly] = field(default_factory=dict)

    @property
    def u(self) -> tuple[int, ...]:
        return tuple(range(1, self.n + 1))

    @property
    def v(self) -> tuple[int, ...]:
        return tuple(range(self.n + 1, 2 * self.n + 1))

    @property
    def f_table(self) -> dict[int, MultiPoly]:
        return {**self.lower, self.n: self.f}

    def full_table(self) -> LocalClassTable:
        """Classes at all fixed points (large for n >= 4)."""
        table = omega1_known_table(self.n, self.lower)
        table[omega1_base_point(self.n)] = self.f
        return table

    def schur_table(self):
        from .symfunc import expand_two_alphabets
        return expand_two_alphabets(self.f, self.u, self.v, negate_x=True)


METHODS = ("direct", "gkm", "grouped")


def solve_omega1_level(n: int, f_table: Mapping[int, MultiPoly], method: str = "direct",
                       workers: int = 1) -> MultiPoly:
    """f_n from f_1..f_{n-1} by the chosen method."""
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}; expected one of {', '.join(METHODS)}")
    p0 = omega1_base_point(n)
    top = n * n
    if method == "gkm":
        graph = gkm_graph(n, 2 * n)
        known = LocalClassTable(n, 2 * n)
        for q, _ in graph.incident(p0):
            known[q] = omega1_stratum_class(q, n, f_table)
        return gkm_solve(graph, known, p0, member=True)
    groups = omega1_groups(n) if method == "grouped" else None
    parts = remainder_from_summands(omega1_summands(n, f_table), 2 * n, range(top),
                                    groups, workers, translation_invariant=True)
    return _assemble(parts, p0, True, top, codim=1)


def omega1_raw_top_degree(n: int, f_table: Mapping[int, MultiPoly]) -> MultiPoly:
    """The localization remainder in degree n^2, before the anchor replaces it."""
    top = n * n
    return remainder_from_summands(omega1_summands(n, f_table), 2 * n, [top])[top]


def _cache_path(cache_dir, k: int) -> Path:
    return Path(cache_dir) / f"f_{k}.json"


def load_cached(cache_dir, k: int) -> MultiPoly | None:
    path = _cache_path(cache_dir, k)
    if not path.exists():
        return None
    data = json.loads(path.read_text())
    if data.get("format_version") != FORMAT_VERSION or data.get("k") != k:
        log.warning("ignoring stale cache file %s", path)
        return None
    poly = MultiPoly.from_json(data)
    if poly.nvars != 2 * k:
        log.warning("ignoring cache file %s with %d variables", path, poly.nvars)
        return None
    return poly


def store_cached(cache_dir, k: int, f: MultiPoly) -> Path:
    """Write f_k atomically (temporary file, then rename)."""
    path = _cache_path(cache_dir, k)
    path.parent.mkdir(parents=True, exist_ok=True)
    data = {"k": k, "format_version": FORMAT_VERSION, **f.to_json()}
    fd, tmp = tempfile.mkstemp(prefix=f".f_{k}.", suffix=".tmp", dir=path.parent)
    try:
        with os.fdopen(fd, "w") as fh:
            json.dump(data, fh, indent=1, sort_keys=True)
            fh.write("\n")
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def omega1_local(n: int, method: str = "direct", cache_dir=None, workers: int = 1,
                 heavy: bool = False) -> Omega1Result:
    """f_n and the full table of Omega_1(n), by induction on n.

    Lower levels f_k are read from ``cache_dir`` when present and written
    back after being computed.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    if n >= HEAVY_FROM and not heavy:
        raise HeavyRunRefused(f"n={n} is a heavy run; pass heavy=True to allow it")
    f_table: dict[int, MultiPoly] = {}
    for k in range(1, n + 1):
        cached = load_cached(cache_dir, k) if cache_dir is not None and k < n else None
        if cached is not None:
            f_table[k] = cached
            continue
        log.info("computing f_%d by %s", k, method)
        f_table[k] = solve_omega1_level(k, f_table, method, workers)
        if cache_dir is not None:
            store_cached(cache_dir, k, f_table[k])
    return Omega1Result(n, method, f_table[n], {k: f_table[k] for k in range(1, n)})


# --- toric oracle --------------------------------------------------------------

def toric_quadric_oracle() -> MultiPoly:
    """CSM class at 0 of the cone ad = bc as a sum of orbit closure classes.

    Coordinates a, b, c, d carry weights t3-t1, t4-t1, t3-t2, t4-t2.  The
    orbits are the open one, four planes (a zero row or column), four axes
    and the origin; each closure is a linear subspace or the cone itself.
    """
    nv = 4
    a, b, c, d = (LinearForm.diff(nv, j, i).to_poly() for i, j in ((1, 3), (1, 4), (2, 3), (2, 4)))
    w = [a, b, c, d]
    cone = a + d  # weight of the equation ad - bc
    planes = c * d + a * b + b * d + a * c  # a zero row: {c=d=0}, {a=b=0}; a zero column: {b=d=0}, {a=c=0}
    axes = elementary_symmetric(w, nv)[3]
    origin = product(w, nv)
    return cone + planes + axes + origin
