"""Torus-fixed points of Grassmannians and localization integrals.

Projective space P^n is Grass_1(C^{n+1}); at the fixed point p_k the line
bundle O(1) restricts to -t_k and the tautological subbundle R has Chern
roots t_i, i in lambda, while the quotient Q has roots t_j, j not in lambda.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import partial
from math import factorial
from typing import Callable, Mapping, Sequence

from .polyarith import (FractionTerm, LinearForm, MultiPoly, SumNode, coefficients_in,
                        elementary_symmetric, product, sum_fractions)
from .symfunc import Partition, SchurTable, is_symmetric, NotSymmetric, schur


@dataclass(frozen=True, order=True)
class GrassPoint:
    """The coordinate subspace spanned by e_i, i in ``subset``, of C^n."""

    subset: tuple[int, ...]
    n: int

    def __post_init__(self):
        s = tuple(self.subset)
        object.__setattr__(self, "subset", s)
        if any(a >= b for a, b in zip(s, s[1:])):
            raise ValueError(f"subset {s} must be strictly increasing")
        if s and (s[0] < 1 or s[-1] > self.n):
            raise ValueError(f"subset {s} not inside 1..{self.n}")

    @property
    def m(self) -> int:
        return len(self.subset)

    @property
    def complement(self) -> tuple[int, ...]:
        return tuple(i for i in range(1, self.n + 1) if i not in self.subset)

    def __str__(self):
        return "p" + ",".join(map(str, self.subset))


def _check_sizes(m: int, n: int):
    if not 0 < m < n:
        raise ValueError(f"need 0 < m < n, got m={m}, n={n}")


def fixed_points(m: int, n: int) -> list[GrassPoint]:
    _check_sizes(m, n)
    return [GrassPoint(s, n) for s in itertools.combinations(range(1, n + 1), m)]


def tangent_weights(p: GrassPoint) -> list[LinearForm]:
    """t_l - t_k for k in the subset, l outside it."""
    return [LinearForm.diff(p.n, l, k) for k in p.subset for l in p.complement]


def euler_class(p: GrassPoint) -> MultiPoly:
    return product((w.to_poly() for w in tangent_weights(p)), p.n)


@dataclass
class LocalClassTable:
    """Restrictions of an equivariant class to the fixed points of Grass_m(C^n)."""

    m: int
    n: int
    classes: dict[GrassPoint, MultiPoly] = field(default_factory=dict)

    def __getitem__(self, p) -> MultiPoly:
        return self.classes[self._point(p)]

    def __setitem__(self, p, value: MultiPoly):
        self.classes[self._point(p)] = value

    def __contains__(self, p):
        return self._point(p) in self.classes

    def _point(self, p) -> GrassPoint:
        return p if isinstance(p, GrassPoint) else GrassPoint(tuple(p), self.n)

    def points(self) -> list[GrassPoint]:
        return sorted(self.classes)

    def without(self, p) -> "LocalClassTable":
        p = self._point(p)
        return LocalClassTable(self.m, self.n, {q: c for q, c in self.classes.items() if q != p})

    @property
    def dimension(self) -> int:
        return self.m * (self.n - self.m)

    def to_json(self) -> dict:
        return {"grass": [self.m, self.n],
                "classes": [{"point": list(p.subset), "poly": self.classes[p].to_json()}
                            for p in self.points()]}

    @classmethod
    def from_json(cls, data: Mapping) -> "LocalClassTable":
        m, n = data["grass"]
        table = cls(m, n)
        for row in data["classes"]:
            table[tuple(row["point"])] = MultiPoly.from_json(row["poly"])
        return table


def localization_terms(table: LocalClassTable) -> list[FractionTerm]:
    missing = [p for p in fixed_points(table.m, table.n) if p not in table.classes]
    if missing:
        raise ValueError(f"no class given at {', '.join(map(str, missing))}")
    return [FractionTerm.make(table.classes[p], tangent_weights(p)) for p in table.points()]


def nest_by_membership(points: Sequence[GrassPoint], leaf: Callable, var: int | None = None):
    """Nested grouping of points by membership of t_n, then t_{n-1}, ...

    Points agreeing on the variables above ``var`` form the fixed locus of a
    subtorus, a product of smaller Grassmannians, so their partial sum has
    no poles along differences of the remaining variables.  Each node
    carries that as a hint: only forms in t_1..t_var are tried for
    cancellation when its two halves are added.
    """
    points = list(points)
    if var is None:
        var = max((p.n for p in points), default=0)
    if len(points) == 1 or var == 0:
        return [leaf(p) for p in points] if len(points) > 1 else leaf(points[0])
    inside = [p for p in points if var in p.subset]
    outside = [p for p in points if var not in p.subset]
    if not inside or not outside:
        return nest_by_membership(points, leaf, var - 1)
    return SumNode([nest_by_membership(outside, leaf, var - 1),
                    nest_by_membership(inside, leaf, var - 1)],
                   cancels=partial(_form_within, var))


def _form_within(var: int, form: LinearForm) -> bool:
    return not any(form.coeffs[var:])


def localization_plan(table: LocalClassTable):
    missing = [p for p in fixed_points(table.m, table.n) if p not in table.classes]
    if missing:
        raise ValueError(f"no class given at {', '.join(map(str, missing))}")
    return nest_by_membership(
        table.points(), lambda p: FractionTerm.make(table.classes[p], tangent_weights(p)))


def integrate(table: LocalClassTable, degree_cap: int | None = None, workers: int = 1) -> MultiPoly:
    """sum_p table[p] / e_p, certified polynomial."""
    plan = localization_plan(table)
    if isinstance(plan, FractionTerm):
        plan = [plan]
    return sum_fractions(plan, degree_cap=degree_cap, workers=workers)


def instantiate(W: MultiPoly, m: int, n: int) -> LocalClassTable:
    """Table W(t_i : i in lambda) for a symmetric template W in m slots."""
    if W.nvars != m:
        raise ValueError(f"template must have {m} variables")
    if not is_symmetric(W, range(1, m + 1)):
        raise NotSymmetric("template is not symmetric in its slots")
    table = LocalClassTable(m, n)
    for p in fixed_points(m, n):
        table[p] = W.embed(n, p.subset)
    return table


def integrate_symmetric(W: MultiPoly, m: int, n: int, workers: int = 1) -> MultiPoly:
    return integrate(instantiate(W, m, n), workers=workers)


def c1_power_template(m: int, power: int) -> MultiPoly:
    """(-(x_1 + ... + x_m))^power, i.e. c_1(det R^*)^power."""
    return (-MultiPoly.linear([1] * m)) ** power


def gysin_schur(J: Sequence[int], K: Sequence[int], m: int, n: int,
                strict: bool = False) -> SchurTable:
    """Integral of S_J(Q) S_K(R) over Grass_m(C^n) as a signed Schur function.

    The sequence (j_1-m, ..., j_{n-m}-m, k_1, ..., k_m) is turned into a
    partition by the alternant rule: add (n-1, ..., 0), sort decreasingly
    with the sign of the sorting permutation, subtract (n-1, ..., 0).  A
    repeated entry gives zero.
    """
    _check_sizes(m, n)
    J, K = Partition(J), Partition(K)
    j = J.padded(n - m)
    k = K.padded(m)
    if strict and j[-1] - m < k[0]:
        raise ValueError(f"j_(n-m) - m >= k_1 fails for J={tuple(J)}, K={tuple(K)}")
    alpha = [x - m for x in j] + list(k)
    beta = [a + n - 1 - i for i, a in enumerate(alpha)]
    table = SchurTable(n, (tuple(range(1, n + 1)),), (False,))
    if len(set(beta)) < n or min(beta) < 0:
        return table
    order = sorted(range(n), key=lambda i: -beta[i])
    sign = _perm_sign(order)
    I = Partition(beta[i] - (n - 1 - r) for r, i in enumerate(order))
    table.entries[(I,)] = sign
    return table


def _perm_sign(perm: Sequence[int]) -> int:
    inv = sum(1 for a in range(len(perm)) for b in range(a + 1, len(perm)) if perm[a] > perm[b])
    return -1 if inv % 2 else 1


def gysin_direct(J: Sequence[int], K: Sequence[int], m: int, n: int) -> MultiPoly:
    """The same integral evaluated by summing over fixed points."""
    J, K = Partition(J), Partition(K)
    table = LocalClassTable(m, n)
    for p in fixed_points(m, n):
        table[p] = schur(J, p.complement, n) * schur(K, p.subset, n)
    return integrate(table)


def residue_at_infinity(F: MultiPoly, z: int, roots: Sequence[int]) -> MultiPoly:
    """Res_{z=inf} F / prod_i (t_i - z) for the listed root variables t_i.

    Computed as -r_{d-1}/lc where r is the remainder of F divided by the
    denominator viewed as a polynomial in z of degree d.
    """
    nv = F.nvars
    t = [MultiPoly.var(nv, i) for i in roots]
    d = len(t)
    e = elementary_symmetric(t, nv)
    # prod(t_i - z) = sum_k (-1)^k e_{d-k}(t) z^k
    q = [e[d - k].scale((-1) ** k) for k in range(d + 1)]
    lc = (-1) ** d
    a = coefficients_in(F, z)
    for k in range(max(a, default=-1), d - 1, -1):
        ak = a.pop(k, None)
        if ak is None or ak.is_zero():
            continue
        factor = ak.scale(-lc)  # -a_k / q_d, with q_d = lc = +-1
        for i in range(d):
            if q[i].is_zero():
                continue
            idx = k - d + i
            a[idx] = a.get(idx, MultiPoly.zero(nv)) + factor * q[i]
    top = a.get(d - 1, MultiPoly.zero(nv))
    return top.scale(-lc)


def residue_integral(W: MultiPoly, m: int, n: int) -> MultiPoly:
    """(1/m!) Res_{z_1=inf} ... Res_{z_m=inf} W(z) prod_{i!=j}(z_i-z_j) / prod(t_i - z_j)."""
    _check_sizes(m, n)
    if W.nvars != m:
        raise ValueError(f"template must have {m} variables")
    nv = n + m
    zs = list(range(n + 1, n + m + 1))
    F = W.embed(nv, zs)
    z = [MultiPoly.var(nv, i) for i in zs]
    for i in range(m):
        for j in range(m):
            if i != j:
                F = F * (z[i] - z[j])
    for zi in reversed(zs):
        F = residue_at_infinity(F, zi, range(1, n + 1))
    F = F.scale(Fraction(1, factorial(m)))
    if F.variables() - set(range(1, n + 1)):
        raise ArithmeticError("residue left z variables behind")
    return MultiPoly(n, {k: c for k, c in _drop_vars(F, n).items()})


def _drop_vars(F: MultiPoly, n: int) -> dict:
    # F only involves t_1..t_n; re-pack into an n-variable ring
    return MultiPoly.from_terms(n, [(exp[:n], c) for exp, c in F.terms.items()])._c


@dataclass
class GKMGraph:
    m: int
    n: int
    vertices: list[GrassPoint]
    edges: list[tuple[GrassPoint, GrassPoint, LinearForm]]

    def incident(self, p: GrassPoint) -> list[tuple[GrassPoint, LinearForm]]:
        """Neighbours q of p with the weight of the curve pq as seen from p."""
        out = []
        for a, b, w in self.edges:
            if a == p:
                out.append((b, w))
            elif b == p:
                out.append((a, -w))
        return out

    def valence(self, p: GrassPoint) -> int:
        return sum(1 for a, b, _ in self.edges if p in (a, b))


def neighbours(p: GrassPoint) -> list[tuple[GrassPoint, LinearForm]]:
    """(q, t_j - t_i) for q = p - {i} + {j}, in tangent-weight order."""
    out = []
    for i in p.subset:
        for j in p.complement:
            q = GrassPoint(tuple(sorted(set(p.subset) - {i} | {j})), p.n)
            out.append((q, LinearForm.diff(p.n, j, i)))
    return out


def gkm_graph(m: int, n: int) -> GKMGraph:
    verts = fixed_points(m, n)
    edges = []
    for p in verts:
        for q, w in neighbours(p):
            if p < q:
                edges.append((p, q, w))
    return GKMGraph(m, n, verts, edges)
