"""Spanning-tree difference bases and nonnegativity of coefficients.

A translation-invariant polynomial in t_1..t_N is a polynomial in the
differences t_j - t_i.  A spanning tree on 1..N with oriented edges i -> j
gives free generators u_e = t_j - t_i of that ring.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .polyarith import Coef, LinearForm, MultiPoly, to_text


class NotTranslationInvariant(ValueError):
    pass


@dataclass(frozen=True)
class TreeBasis:
    """Oriented spanning tree; edge (i, j) stands for u = t_j - t_i."""

    nvertices: int
    edges: tuple[tuple[int, int], ...]

    def __post_init__(self):
        object.__setattr__(self, "edges", tuple((int(i), int(j)) for i, j in self.edges))
        n = self.nvertices
        if len(self.edges) != n - 1:
            raise ValueError(f"a spanning tree on {n} vertices has {n - 1} edges, got {len(self.edges)}")
        parent = list(range(n + 1))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for i, j in self.edges:
            if not (1 <= i <= n and 1 <= j <= n) or i == j:
                raise ValueError(f"bad edge {i}>{j}")
            ri, rj = find(i), find(j)
            if ri == rj:
                raise ValueError(f"edge {i}>{j} closes a cycle")
            parent[ri] = rj

    @classmethod
    def parse(cls, text: str, nvertices: int | None = None) -> "TreeBasis":
        """Read ``"1>2,2>4,4>3"``."""
        edges = []
        for chunk in text.replace(" ", "").split(","):
            if not chunk:
                continue
            if ">" not in chunk:
                raise ValueError(f"edge {chunk!r} must look like i>j")
            a, b = chunk.split(">")
            edges.append((int(a), int(b)))
        if nvertices is None:
            nvertices = max((max(e) for e in edges), default=1)
        return cls(nvertices, tuple(edges))

    def __str__(self):
        return ",".join(f"{i}>{j}" for i, j in self.edges)

    def forms(self) -> list[LinearForm]:
        return [LinearForm.diff(self.nvertices, j, i) for i, j in self.edges]

    def paths(self) -> list[dict[int, int]]:
        """t_v - t_1 as {edge index: +-1} for v = 1..N."""
        adj: dict[int, list[tuple[int, int, int]]] = {v: [] for v in range(1, self.nvertices + 1)}
        for k, (i, j) in enumerate(self.edges):
            adj[i].append((j, k, 1))
            adj[j].append((i, k, -1))
        out: dict[int, dict[int, int]] = {1: {}}
        stack = [1]
        while stack:
            x = stack.pop()
            for y, k, s in adj[x]:
                if y not in out:
                    out[y] = {**out[x], k: s}
                    stack.append(y)
        return [out[v] for v in range(1, self.nvertices + 1)]

    def coordinates(self, form: LinearForm) -> list[int]:
        """Unique integer coefficients of a difference form in the u_e."""
        if sum(form.coeffs) != 0:
            raise NotTranslationInvariant(f"{form} is not a combination of differences")
        coords = [0] * len(self.edges)
        for c, path in zip(form.coeffs, self.paths()):
            for k, s in path.items():
                coords[k] += c * s
        return coords


def is_translation_invariant(p: MultiPoly) -> bool:
    """sum_i dp/dt_i = 0, i.e. p(t + c) = p(t)."""
    total = MultiPoly.zero(p.nvars)
    for i in range(1, p.nvars + 1):
        total = total + p.derivative(i)
    return total.is_zero()


def change_basis(p: MultiPoly, tree: TreeBasis) -> MultiPoly:
    """p as a polynomial in u_1..u_{N-1}, where u_k is the k-th tree edge."""
    if p.nvars != tree.nvertices:
        raise ValueError(f"polynomial has {p.nvars} variables, tree has {tree.nvertices} vertices")
    if not is_translation_invariant(p):
        raise NotTranslationInvariant("polynomial changes under t_i -> t_i + c")
    m = len(tree.edges)
    images = []
    for path in tree.paths():
        coeffs = [0] * m
        for k, s in path.items():
            coeffs[k] = s
        images.append(MultiPoly.linear(coeffs) if m else MultiPoly.zero(0))
    return p.substitute(images)


def back_substitute(q: MultiPoly, tree: TreeBasis) -> MultiPoly:
    """Inverse of change_basis: u_k -> t_j - t_i."""
    return q.substitute([f.to_poly() for f in tree.forms()])


def is_positive_basis(tree: TreeBasis, weights: Iterable[LinearForm]) -> bool:
    """Every weight is a nonnegative combination of the tree generators."""
    return all(min(tree.coordinates(w), default=0) >= 0 for w in weights)


def orient_tree(edges: Sequence[tuple[int, int]], nvertices: int,
                negative: Iterable[int], positive: Iterable[int]) -> TreeBasis:
    """Orient an unoriented tree so that every t_j - t_i, i negative and j positive,
    is a nonnegative combination, when that is possible.

    Removing an edge splits the vertices in two.  If the split separates some
    pair (i, j), the edge must point away from the side holding the i.  An
    edge that separates pairs both ways cannot be oriented and raises.
    """
    neg, pos = set(negative), set(positive)
    out = []
    for k, (a, b) in enumerate(edges):
        rest = [e for idx, e in enumerate(edges) if idx != k]
        side = {a}
        grown = True
        while grown:
            grown = False
            for x, y in rest:
                if (x in side) != (y in side):
                    side |= {x, y}
                    grown = True
        forward = bool(side & neg) and bool(pos - side)
        backward = bool(neg - side) and bool(side & pos)
        if forward and backward:
            raise ValueError(f"edge {a}-{b} separates weights in both directions")
        out.append((b, a) if backward else (a, b))
    return TreeBasis(nvertices, tuple(out))


@dataclass
class NonnegReport:
    ok: bool
    offenders: list[tuple[tuple[int, ...], Coef]] = field(default_factory=list)

    def describe(self, prefix: str = "u") -> str:
        if self.ok:
            return "PASS"
        n = len(self.offenders[0][0]) if self.offenders else 0
        shown = [to_text(MultiPoly.from_terms(n, {e: c}), prefix) for e, c in self.offenders[:10]]
        more = f" (+{len(self.offenders) - 10} more)" if len(self.offenders) > 10 else ""
        return "FAIL: " + ", ".join(shown) + more


def check_nonneg(p: MultiPoly) -> NonnegReport:
    bad = [(e, c) for e, c in sorted(p.terms.items(), reverse=True) if c < 0]
    return NonnegReport(not bad, bad)
