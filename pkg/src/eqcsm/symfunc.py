"""Partitions, Schur polynomials and Schur-basis expansions."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from math import factorial, prod
from typing import Iterable, Mapping, Sequence

from .polyarith import (MASK, SHIFT, Coef, LinearForm, MultiPoly, _as_coef, coef_str,
                        exact_div_linear)


class NotSymmetric(ValueError):
    pass


class Partition(tuple):
    """Weakly decreasing tuple of positive integers (trailing zeros dropped)."""

    def __new__(cls, parts: Iterable[int] = ()):
        parts = [int(p) for p in parts]
        if any(p < 0 for p in parts):
            raise ValueError(f"negative part in {parts}")
        if any(a < b for a, b in zip(parts, parts[1:])):
            raise ValueError(f"{parts} is not weakly decreasing")
        while parts and parts[-1] == 0:
            parts.pop()
        return super().__new__(cls, parts)

    @property
    def weight(self) -> int:
        return sum(self)

    def padded(self, length: int) -> tuple[int, ...]:
        if len(self) > length:
            raise ValueError(f"partition {tuple(self)} longer than {length}")
        return tuple(self) + (0,) * (length - len(self))

    def conjugate(self) -> "Partition":
        if not self:
            return Partition()
        return Partition(sum(1 for p in self if p > j) for j in range(self[0]))

    def label(self) -> str:
        """Compact label as used in coefficient tables ('0', '21', '332')."""
        if not self:
            return "0"
        if all(p < 10 for p in self):
            return "".join(map(str, self))
        return ",".join(map(str, self))

    def __repr__(self):
        return f"Partition({tuple(self)})"


def parse_partition(text: str) -> Partition:
    text = text.strip()
    if text in ("", "0", "()", "[]"):
        return Partition()
    if "," in text:
        return Partition(int(x) for x in text.strip("()[]").split(",") if x.strip())
    return Partition(int(ch) for ch in text)


def partitions_in_rectangle(rows: int, cols: int) -> list[Partition]:
    """Partitions with at most ``rows`` parts, each at most ``cols``.

    Ordered by weight, then by decreasing parts lexicographically.
    """
    out = []

    def rec(prefix, maxpart):
        out.append(Partition(prefix))
        if len(prefix) == rows:
            return
        for p in range(1, maxpart + 1):
            rec(prefix + [p], p)

    rec([], cols)
    return sorted(out, key=lambda p: (p.weight, [-x for x in p]))


def hook_degree(m: int, n: int) -> int:
    """Degree of the Pluecker embedding of Grass_m(C^n), by the hook formula."""
    if not 0 <= m <= n:
        raise ValueError("need 0 <= m <= n")
    rows, cols = m, n - m
    hooks = prod((cols - 1 - j) + (rows - 1 - i) + 1 for i in range(rows) for j in range(cols))
    return factorial(rows * cols) // hooks


def _perm_sign(perm: Sequence[int]) -> int:
    sign = 1
    seen = [False] * len(perm)
    for i in range(len(perm)):
        if seen[i]:
            continue
        j, length = i, 0
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


@lru_cache(maxsize=None)
def _schur_local(parts: tuple[int, ...], k: int) -> MultiPoly:
    # bialternant det[x_i^(I_j + k - j)] / prod_{i<j}(x_i - x_j)
    lam = Partition(parts).padded(k)
    powers = [lam[j] + k - 1 - j for j in range(k)]
    num: dict = {}
    for perm in itertools.permutations(range(k)):
        exp = [0] * k
        for row, col in enumerate(perm):
            exp[row] = powers[col]
        key = tuple(exp)
        num[key] = num.get(key, 0) + _perm_sign(perm)
    p = MultiPoly.from_terms(k, num)
    for i in range(k):
        for j in range(i + 1, k):
            p = exact_div_linear(p, LinearForm.diff(k, i + 1, j + 1))
    return p


def schur(I: Sequence[int], vars: Sequence[int], nvars: int | None = None,
          negate: bool = False) -> MultiPoly:
    """S_I in the variables ``vars`` (1-based) of a ring with ``nvars`` variables.

    With ``negate`` the result is S_I(-t_v1, -t_v2, ...).
    """
    I = Partition(I)
    vars = list(vars)
    if nvars is None:
        nvars = max(vars) if vars else 0
    if len(I) > len(vars):
        raise ValueError(f"partition {tuple(I)} too long for {len(vars)} variables")
    if not vars:
        return MultiPoly.const(nvars, 1)
    local = _schur_local(tuple(I), len(vars))
    if negate and I.weight % 2:
        local = -local
    if list(vars) == list(range(1, nvars + 1)):
        return local
    return local.embed(nvars, vars)


@dataclass
class SchurTable:
    """Coefficients of a polynomial in products of Schur functions.

    Keys are tuples of partitions, one per alphabet.  ``negated[i]`` marks
    alphabets evaluated at the negated variables.
    """

    nvars: int
    alphabets: tuple[tuple[int, ...], ...]
    negated: tuple[bool, ...]
    entries: dict[tuple[Partition, ...], Coef] = field(default_factory=dict)

    def __getitem__(self, key) -> Coef:
        return self.entries.get(self._key(key), 0)

    def _key(self, key):
        if len(self.alphabets) == 1 and (not key or not isinstance(key[0], (tuple, list))):
            key = (key,)
        return tuple(Partition(k) for k in key)

    def get(self, key, default=0):
        return self.entries.get(self._key(key), default)

    def to_poly(self) -> MultiPoly:
        out = MultiPoly.zero(self.nvars)
        for key, c in self.entries.items():
            term = MultiPoly.const(self.nvars, c)
            for part, alph, neg in zip(key, self.alphabets, self.negated):
                term = term * schur(part, alph, self.nvars, neg)
            out = out + term
        return out

    def negative_entries(self) -> dict:
        return {k: c for k, c in self.entries.items() if c < 0}

    def sorted_items(self):
        return sorted(self.entries.items(),
                      key=lambda kv: [(p.weight, [-x for x in p]) for p in kv[0]])

    def to_json(self) -> dict:
        names = ["I", "J", "K", "L"]
        rows = []
        for key, c in self.sorted_items():
            row = {names[i]: list(p) for i, p in enumerate(key)}
            row["coef"] = coef_str(c)
            rows.append(row)
        return {"nvars": self.nvars, "alphabets": [list(a) for a in self.alphabets],
                "negated": list(self.negated), "entries": rows}

    @classmethod
    def from_json(cls, data: Mapping) -> "SchurTable":
        names = ["I", "J", "K", "L"]
        alphabets = tuple(tuple(a) for a in data["alphabets"])
        nvars = data.get("nvars", max((max(a) for a in alphabets if a), default=0))
        negated = tuple(data.get("negated", [False] * len(alphabets)))
        entries = {}
        for row in data["entries"]:
            key = tuple(Partition(row[names[i]]) for i in range(len(alphabets)))
            entries[key] = _as_coef(row["coef"])
        return cls(nvars, alphabets, negated, entries)


def is_symmetric(p: MultiPoly, vars: Sequence[int]) -> bool:
    vars = list(vars)
    for a, b in zip(vars, vars[1:]):
        if p.permute({a: b, b: a}) != p:
            return False
    return True


def _require_symmetric(p: MultiPoly, vars: Sequence[int]):
    if not is_symmetric(p, vars):
        raise NotSymmetric(f"polynomial is not symmetric in t{list(vars)}")


def _split(p: MultiPoly, vars: Sequence[int]) -> dict[tuple[int, ...], MultiPoly]:
    """Group p by its exponent on ``vars``: x^a * C_a(other variables)."""
    n = p.nvars
    shifts = [SHIFT * (v - 1) for v in vars]
    top = SHIFT * n
    groups: dict[tuple[int, ...], dict[int, Coef]] = {}
    for k, c in p.items():
        a = tuple((k >> s) & MASK for s in shifts)
        rest = k - sum(e << s for e, s in zip(a, shifts)) - (sum(a) << top)
        groups.setdefault(a, {})[rest] = c
    return {a: MultiPoly._raw(n, g) for a, g in groups.items()}


def schur_decompose(p: MultiPoly, vars: Sequence[int], negate: bool = False,
                    check: bool = True) -> dict[Partition, MultiPoly]:
    """p = sum_I S_I(+-t_vars) * D_I with D_I free of ``vars``.

    Repeatedly peels off the graded-lex leading exponent on ``vars``; for a
    symmetric polynomial that exponent is a rearranged partition I and S_I
    contributes it with coefficient one.
    """
    vars = list(vars)
    if check:
        _require_symmetric(p, vars)
    k = len(vars)
    groups = _split(p, vars)
    out: dict[Partition, MultiPoly] = {}
    order = lambda a: (sum(a), a[::-1])
    while groups:
        lead = max(groups, key=order)
        I = Partition(sorted(lead, reverse=True))
        if len(I) > k:
            raise NotSymmetric("leading exponent does not fit the alphabet")
        D = groups[lead]
        if negate and I.weight % 2:
            D = -D
        out[I] = D
        sign = -1 if (negate and I.weight % 2) else 1
        for exp, s in _schur_local(tuple(I), k).terms.items():
            cur = groups.get(exp)
            delta = D.scale(s * sign)
            new = delta.scale(-1) if cur is None else cur - delta
            if new.is_zero():
                groups.pop(exp, None)
            else:
                groups[exp] = new
        if lead in groups:
            raise NotSymmetric("expansion did not remove its leading term")
    return out


def _constant(q: MultiPoly) -> Coef:
    if q.degree() > 0:
        raise ValueError("polynomial involves variables outside the alphabets")
    return q.constant_term()


def expand_schur(p: MultiPoly, vars: Sequence[int], negate: bool = False) -> SchurTable:
    """Expand a symmetric polynomial in the vars into Schur functions."""
    vars = tuple(vars)
    entries = {(I,): _constant(D) for I, D in schur_decompose(p, vars, negate).items()}
    return SchurTable(p.nvars, (vars,), (negate,), {k: v for k, v in entries.items() if v})


def expand_two_alphabets(p: MultiPoly, xgroup: Sequence[int], vgroup: Sequence[int],
                         negate_x: bool = True, negate_v: bool = False) -> SchurTable:
    """p = sum a_{I,J} S_I(-t_x) S_J(t_v), separately symmetric in each group."""
    xgroup, vgroup = tuple(xgroup), tuple(vgroup)
    _require_symmetric(p, xgroup)
    _require_symmetric(p, vgroup)
    entries = {}
    for I, D in schur_decompose(p, xgroup, negate_x, check=False).items():
        for J, E in schur_decompose(D, vgroup, negate_v, check=False).items():
            c = _constant(E)
            if c:
                entries[(I, J)] = c
    return SchurTable(p.nvars, (xgroup, vgroup), (negate_x, negate_v), entries)


def complete_homogeneous(k: int, vars: Sequence[int], nvars: int) -> MultiPoly:
    return schur((k,), vars, nvars) if k > 0 else MultiPoly.const(nvars, 1 if k == 0 else 0)
