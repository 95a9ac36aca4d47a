"""Exact sparse polynomials over Q in torus characters t1..tN, and sums of
fractions whose denominators are products of integer linear forms.

Monomials are stored as packed integers: variable ``t_{i+1}`` occupies bit
field ``i`` (``SHIFT`` bits wide) and the total degree sits above the last
variable.  With this layout monomial multiplication is integer addition and
integer comparison of keys is the graded-lex order with t1 < t2 < ... < tN.
"""

from __future__ import annotations

import re
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence, Union

SHIFT = 16
MASK = (1 << SHIFT) - 1

Coef = Union[int, Fraction]


class PolyError(ArithmeticError):
    """Base class for arithmetic failures in this package."""


class ArityError(PolyError, ValueError):
    pass


class NotDivisible(PolyError):
    pass


class NotPolynomial(PolyError):
    """A sum of fractions left a nonzero residual denominator."""


def _norm_coef(c):
    if isinstance(c, Fraction) and c.denominator == 1:
        return c.numerator
    return c


def _as_coef(c) -> Coef:
    if isinstance(c, (int, Fraction)):
        return _norm_coef(c)
    if isinstance(c, str):
        return _norm_coef(Fraction(c))
    raise TypeError(f"unsupported coefficient {c!r}")


def _divc(x: Coef, c: Coef) -> Coef:
    if c == 1:
        return x
    if c == -1:
        return -x
    return _norm_coef(Fraction(x) / c)


class MultiPoly:
    """Immutable sparse polynomial with rational coefficients."""

    __slots__ = ("nvars", "_c", "_hash")

    def __init__(self, nvars: int, packed: Mapping[int, Coef] | None = None):
        self.nvars = nvars
        self._c: dict[int, Coef] = {k: v for k, v in (packed or {}).items() if v}
        self._hash = None

    # -- construction -------------------------------------------------
    @classmethod
    def _raw(cls, nvars: int, packed: dict) -> "MultiPoly":
        # caller guarantees no zero coefficients
        obj = cls.__new__(cls)
        obj.nvars = nvars
        obj._c = packed
        obj._hash = None
        return obj

    @classmethod
    def from_terms(cls, nvars: int, terms: Mapping[Sequence[int], Coef] | Iterable) -> "MultiPoly":
        items = terms.items() if isinstance(terms, Mapping) else terms
        out: dict[int, Coef] = {}
        for exp, c in items:
            k = pack(exp, nvars)
            out[k] = out.get(k, 0) + _as_coef(c)
        return cls(nvars, out)

    @classmethod
    def zero(cls, nvars: int) -> "MultiPoly":
        return cls._raw(nvars, {})

    @classmethod
    def const(cls, nvars: int, c: Coef) -> "MultiPoly":
        c = _as_coef(c)
        return cls._raw(nvars, {0: c} if c else {})

    @classmethod
    def var(cls, nvars: int, i: int) -> "MultiPoly":
        """The character t_i (1-based)."""
        if not 1 <= i <= nvars:
            raise ArityError(f"variable t{i} out of range for nvars={nvars}")
        return cls._raw(nvars, {_unit(i - 1, nvars): 1})

    @classmethod
    def linear(cls, coeffs: Sequence[Coef], const: Coef = 0) -> "MultiPoly":
        n = len(coeffs)
        out = {_unit(i, n): _as_coef(c) for i, c in enumerate(coeffs) if c}
        if const:
            out[0] = _as_coef(const)
        return cls._raw(n, out)

    # -- inspection ---------------------------------------------------
    @property
    def terms(self) -> dict[tuple[int, ...], Coef]:
        """Exponent tuple -> coefficient, in increasing graded-lex order."""
        return {unpack(k, self.nvars): self._c[k] for k in sorted(self._c)}

    def items(self):
        return self._c.items()

    def __len__(self):
        return len(self._c)

    def is_zero(self) -> bool:
        return not self._c

    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        if not self._c:
            return -1
        return max(self._c) >> (SHIFT * self.nvars)

    def low_degree(self) -> int:
        if not self._c:
            return -1
        return min(self._c) >> (SHIFT * self.nvars)

    def constant_term(self) -> Coef:
        return self._c.get(0, 0)

    def is_homogeneous(self) -> bool:
        return self.degree() == self.low_degree()

    def coefficients(self):
        return list(self._c.values())

    # -- ring operations ----------------------------------------------
    def _check(self, other: "MultiPoly"):
        if other.nvars != self.nvars:
            raise ArityError(f"nvars mismatch: {self.nvars} vs {other.nvars}")

    def _coerce(self, other) -> "MultiPoly":
        if isinstance(other, MultiPoly):
            self._check(other)
            return other
        if isinstance(other, (int, Fraction)):
            return MultiPoly.const(self.nvars, other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        a, b = (self._c, other._c) if len(self._c) >= len(other._c) else (other._c, self._c)
        out = dict(a)
        for k, c in b.items():
            v = out.get(k, 0) + c
            if v:
                out[k] = v
            else:
                out.pop(k, None)
        return MultiPoly._raw(self.nvars, out)

    __radd__ = __add__

    def __neg__(self):
        return MultiPoly._raw(self.nvars, {k: -c for k, c in self._c.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c: Coef) -> "MultiPoly":
        c = _as_coef(c)
        if not c:
            return MultiPoly.zero(self.nvars)
        if c == 1:
            return self
        return MultiPoly._raw(self.nvars, {k: _norm_coef(v * c) for k, v in self._c.items()})

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        if not isinstance(other, MultiPoly):
            return NotImplemented
        self._check(other)
        a, b = self._c, other._c
        if len(a) < len(b):
            a, b = b, a
        if not b:
            return MultiPoly.zero(self.nvars)
        out: dict[int, Coef] = {}
        get = out.get
        for kb, cb in b.items():
            if cb == 1:
                for ka, ca in a.items():
                    k = ka + kb
                    out[k] = get(k, 0) + ca
            else:
                for ka, ca in a.items():
                    k = ka + kb
                    out[k] = get(k, 0) + ca * cb
        return MultiPoly(self.nvars, out)

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            raise ValueError("negative power")
        result = MultiPoly.const(self.nvars, 1)
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def __eq__(self, other):
        if isinstance(other, MultiPoly):
            return self.nvars == other.nvars and self._c == other._c
        if isinstance(other, (int, Fraction)):
            return self._c == ({0: other} if other else {})
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.nvars, frozenset(self._c.items())))
        return self._hash

    def __reduce__(self):
        return (MultiPoly, (self.nvars, self._c))

    # -- degree handling ----------------------------------------------
    def homogeneous_component(self, d: int) -> "MultiPoly":
        sh = SHIFT * self.nvars
        return MultiPoly._raw(self.nvars, {k: c for k, c in self._c.items() if k >> sh == d})

    def homogeneous_components(self) -> dict[int, "MultiPoly"]:
        sh = SHIFT * self.nvars
        parts: dict[int, dict] = {}
        for k, c in self._c.items():
            parts.setdefault(k >> sh, {})[k] = c
        return {d: MultiPoly._raw(self.nvars, parts[d]) for d in sorted(parts)}

    def truncate(self, max_degree: int) -> "MultiPoly":
        """Drop all terms of degree above ``max_degree``."""
        sh = SHIFT * self.nvars
        return MultiPoly._raw(self.nvars, {k: c for k, c in self._c.items() if k >> sh <= max_degree})

    # -- substitutions ------------------------------------------------
    def specialize(self, src: int, dst: int) -> "MultiPoly":
        """Substitute t_src <- t_dst (1-based)."""
        if src == dst:
            return self
        s, dsh = SHIFT * (src - 1), SHIFT * (dst - 1)
        out: dict[int, Coef] = {}
        for k, c in self._c.items():
            e = (k >> s) & MASK
            if e:
                k = k - (e << s) + (e << dsh)
            out[k] = out.get(k, 0) + c
        return MultiPoly(self.nvars, out)

    def permute(self, perm: Mapping[int, int]) -> "MultiPoly":
        """Rename variables t_i -> t_perm[i] (1-based, must be a bijection on its keys)."""
        n = self.nvars
        moves = [(SHIFT * (i - 1), SHIFT * (j - 1)) for i, j in perm.items() if i != j]
        if not moves:
            return self
        out: dict[int, Coef] = {}
        for k, c in self._c.items():
            nk = k
            for s, _ in moves:
                nk -= ((k >> s) & MASK) << s
            for s, d in moves:
                nk += ((k >> s) & MASK) << d
            out[nk] = c
        return MultiPoly._raw(n, out)

    def embed(self, nvars: int, positions: Sequence[int]) -> "MultiPoly":
        """Move t_i to t_{positions[i-1]} in a ring with ``nvars`` variables."""
        if len(positions) != self.nvars:
            raise ArityError("positions must list every variable")
        out: dict[int, Coef] = {}
        for k, c in self._c.items():
            exp = unpack(k, self.nvars)
            new = [0] * nvars
            for e, p in zip(exp, positions):
                new[p - 1] += e
            nk = pack(new, nvars)
            out[nk] = out.get(nk, 0) + c
        return MultiPoly(nvars, out)

    def substitute(self, images: Sequence["MultiPoly"]) -> "MultiPoly":
        """Compose with polynomial images of each variable (all in one ring).

        Horner evaluation in t_N, then t_{N-1}, ... on the coefficients.
        """
        if len(images) != self.nvars:
            raise ArityError("need one image per variable")
        target = images[0].nvars if images else 0
        if any(im.nvars != target for im in images):
            raise ArityError("images live in different rings")

        def horner(p: "MultiPoly", v: int) -> "MultiPoly":
            if p.is_zero():
                return MultiPoly.zero(target)
            if v == 0:
                return MultiPoly.const(target, p.constant_term())
            parts = coefficients_in(p, v)
            acc = MultiPoly.zero(target)
            for k in range(max(parts), -1, -1):
                acc = acc * images[v - 1]
                if k in parts:
                    acc = acc + horner(parts[k], v - 1)
            return acc

        return horner(self, self.nvars)

    def evaluate(self, point: Sequence[Coef]) -> Coef:
        if len(point) != self.nvars:
            raise ArityError("point has wrong length")
        total: Coef = 0
        for k, c in self._c.items():
            v = c
            for i, e in enumerate(unpack(k, self.nvars)):
                if e:
                    v *= point[i] ** e
            total += v
        return _norm_coef(total)

    def set_zero(self, i: int) -> "MultiPoly":
        """Substitute t_i = 0."""
        s = SHIFT * (i - 1)
        return MultiPoly._raw(self.nvars, {k: c for k, c in self._c.items() if not (k >> s) & MASK})

    def derivative(self, i: int) -> "MultiPoly":
        s = SHIFT * (i - 1)
        step = (1 << s) + (1 << (SHIFT * self.nvars))
        out = {}
        for k, c in self._c.items():
            e = (k >> s) & MASK
            if e:
                out[k - step] = c * e
        return MultiPoly._raw(self.nvars, out)

    def variables(self) -> set[int]:
        """1-based indices of variables that occur."""
        used = 0
        for k in self._c:
            used |= k
        return {i + 1 for i in range(self.nvars) if (used >> (SHIFT * i)) & MASK}

    def exact_div_linear(self, form: "LinearForm") -> "MultiPoly":
        return exact_div_linear(self, form)

    # -- text and json --------------------------------------------------
    def __str__(self):
        return to_text(self)

    def __repr__(self):
        return f"MultiPoly({self.nvars}, {to_text(self)!r})"

    def to_json(self) -> dict:
        return {
            "nvars": self.nvars,
            "terms": [{"exp": list(unpack(k, self.nvars)), "coef": coef_str(self._c[k])}
                      for k in sorted(self._c, reverse=True)],
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "MultiPoly":
        return cls.from_terms(data["nvars"], [(t["exp"], t["coef"]) for t in data["terms"]])


def pack(exp: Sequence[int], nvars: int) -> int:
    if len(exp) != nvars:
        raise ArityError(f"exponent {tuple(exp)} does not have length {nvars}")
    key = 0
    deg = 0
    for i, e in enumerate(exp):
        if e < 0 or e > MASK:
            raise ValueError(f"exponent {e} out of range")
        key |= e << (SHIFT * i)
        deg += e
    return key | (deg << (SHIFT * nvars))


def unpack(key: int, nvars: int) -> tuple[int, ...]:
    return tuple((key >> (SHIFT * i)) & MASK for i in range(nvars))


def _unit(i: int, nvars: int) -> int:
    return (1 << (SHIFT * i)) | (1 << (SHIFT * nvars))


def coef_str(c: Coef) -> str:
    c = _norm_coef(c)
    if isinstance(c, Fraction):
        return f"{c.numerator}/{c.denominator}"
    return str(c)


def to_text(p: MultiPoly, prefix: str = "t") -> str:
    """Canonical text: terms in decreasing graded-lex order."""
    if p.is_zero():
        return "0"
    parts = []
    for k in sorted(p._c, reverse=True):
        c = _norm_coef(p._c[k])
        mono = "*".join(
            f"{prefix}{i + 1}" if e == 1 else f"{prefix}{i + 1}^{e}"
            for i, e in enumerate(unpack(k, p.nvars)) if e
        )
        neg = c < 0
        a = -c if neg else c
        if mono and a == 1:
            body = mono
        elif mono:
            body = f"{coef_str(a)}*{mono}"
        else:
            body = coef_str(a)
        if not parts:
            parts.append(f"-{body}" if neg else body)
        else:
            parts.append(f"- {body}" if neg else f"+ {body}")
    return " ".join(parts)


_TERM = re.compile(r"([+-])?\s*([^+-]+)")
_FACTOR = re.compile(r"^([A-Za-z]+)(\d+)(?:\^(\d+))?$")


def parse_poly(text: str, nvars: int, prefix: str = "t") -> MultiPoly:
    """Parse the canonical text form (sums of ``coef*var^e*...`` terms).

    Parentheses are not supported; this reads back what ``to_text`` prints.
    """
    s = text.replace(" ", "")
    if not s:
        raise ValueError("empty polynomial")
    out: dict[int, Coef] = {}
    pos = 0
    for m in _TERM.finditer(s):
        if m.start() != pos:
            raise ValueError(f"cannot parse {text!r}")
        pos = m.end()
        sign = -1 if m.group(1) == "-" else 1
        coef: Coef = sign
        exp = [0] * nvars
        for factor in m.group(2).split("*"):
            fm = _FACTOR.match(factor)
            if fm:
                if fm.group(1) != prefix:
                    raise ValueError(f"unknown variable {factor!r}")
                i = int(fm.group(2))
                if not 1 <= i <= nvars:
                    raise ArityError(f"variable {factor!r} out of range")
                exp[i - 1] += int(fm.group(3) or 1)
            else:
                coef = coef * Fraction(factor)
        k = pack(exp, nvars)
        out[k] = out.get(k, 0) + _norm_coef(coef)
    if pos != len(s):
        raise ValueError(f"cannot parse {text!r}")
    return MultiPoly(nvars, out)


@dataclass(frozen=True)
class LinearForm:
    """A nonzero integer linear form sum(c_i t_i)."""

    coeffs: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(int(c) for c in self.coeffs))
        if not any(self.coeffs):
            raise ValueError("linear form must be nonzero")

    @classmethod
    def diff(cls, nvars: int, j: int, i: int) -> "LinearForm":
        """t_j - t_i (1-based)."""
        c = [0] * nvars
        c[j - 1] += 1
        c[i - 1] -= 1
        return cls(tuple(c))

    @property
    def nvars(self) -> int:
        return len(self.coeffs)

    def normalized(self) -> tuple[int, "LinearForm"]:
        """(sign, form) with the first nonzero coefficient of form positive."""
        first = next(c for c in self.coeffs if c)
        if first > 0:
            return 1, self
        return -1, LinearForm(tuple(-c for c in self.coeffs))

    def __neg__(self):
        return LinearForm(tuple(-c for c in self.coeffs))

    def to_poly(self) -> MultiPoly:
        return MultiPoly.linear(self.coeffs)

    def __str__(self):
        return to_text(self.to_poly())


def add(a: MultiPoly, b: MultiPoly) -> MultiPoly:
    return a + b


def mul(a: MultiPoly, b: MultiPoly) -> MultiPoly:
    return a * b


def homogeneous_component(p: MultiPoly, d: int) -> MultiPoly:
    return p.homogeneous_component(d)


def product(factors: Iterable[MultiPoly], nvars: int) -> MultiPoly:
    out = MultiPoly.const(nvars, 1)
    for f in factors:
        out = out * f
    return out


def substitute_linear(p: MultiPoly, assignment: Sequence[tuple[Sequence[Coef], Coef]]) -> MultiPoly:
    """Substitute t_i <- sum_k a_ik t_k + b_i for every variable.

    ``assignment[i]`` is ``(coeffs, constant)`` for t_{i+1}; all coefficient
    vectors share one length, the number of variables of the result.
    """
    if len(assignment) != p.nvars:
        raise ArityError("assignment must cover every variable")
    return p.substitute([MultiPoly.linear(list(c), b) for c, b in assignment])


def exact_div_linear(p: MultiPoly, form: LinearForm) -> MultiPoly:
    """Quotient q with q * form == p; raises NotDivisible otherwise.

    Synthetic division in the leading variable x of the form (its highest
    index variable): writing form = c*x + g and p = sum a_k x^k, the quotient
    coefficients satisfy b_{k-1} = (a_k - g*b_k)/c and a_0 = g*b_0.
    """
    n = p.nvars
    if form.nvars != n:
        raise ArityError("form and polynomial have different nvars")
    x = max(i for i, c in enumerate(form.coeffs) if c)
    c = form.coeffs[x]
    xs = SHIFT * x
    top = SHIFT * n
    xstep = (1 << xs) | (1 << top)
    g = [((1 << (SHIFT * i)) | (1 << top), -gc) for i, gc in enumerate(form.coeffs) if gc and i != x]

    slices: dict[int, dict[int, Coef]] = {}
    for k, v in p._c.items():
        e = (k >> xs) & MASK
        slices.setdefault(e, {})[k - e * xstep] = v
    if not slices:
        return MultiPoly.zero(n)

    quotient: dict[int, Coef] = {}
    b: dict[int, Coef] = {}
    for e in range(max(slices), -1, -1):
        cur = dict(slices.get(e, ()))
        # cur = a_e - g*b_e, with g stored negated
        for shift, ng in g:
            for k, v in b.items():
                kk = k + shift
                w = cur.get(kk, 0) + ng * v
                if w:
                    cur[kk] = w
                else:
                    cur.pop(kk, None)
        if e == 0:
            if cur:
                raise NotDivisible(f"polynomial with {len(p._c)} terms is not divisible by {form}")
            break
        b = {k: _divc(v, c) for k, v in cur.items()}
        off = (e - 1) * xstep
        for k, v in b.items():
            quotient[k + off] = v
    return MultiPoly._raw(n, quotient)


def _combine_forms(forms: Iterable[LinearForm]) -> tuple[int, Counter]:
    sign = 1
    cnt: Counter = Counter()
    for f in forms:
        s, nf = f.normalized()
        sign *= s
        cnt[nf] += 1
    return sign, cnt


@dataclass(frozen=True)
class FractionTerm:
    """numerator / (sign * prod(form**mult))."""

    numerator: MultiPoly
    denominator: tuple[tuple[LinearForm, int], ...] = ()
    sign: int = 1

    @classmethod
    def make(cls, numerator: MultiPoly, forms: Iterable[LinearForm]) -> "FractionTerm":
        sign, cnt = _combine_forms(forms)
        for f in cnt:
            if f.nvars != numerator.nvars:
                raise ArityError("denominator form has wrong nvars")
        return cls(numerator, tuple(sorted(cnt.items(), key=lambda fm: fm[0].coeffs)), sign)

    @classmethod
    def ratio(cls, numerator: MultiPoly, num_forms: Iterable[LinearForm],
              den_forms: Iterable[LinearForm]) -> "FractionTerm":
        """numerator * prod(num_forms) / prod(den_forms), cancelling shared forms first."""
        s1, top = _combine_forms(num_forms)
        s2, bot = _combine_forms(den_forms)
        common = top & bot
        top -= common
        bot -= common
        num = numerator.scale(s1 * s2)
        for f, m in sorted(top.items(), key=lambda fm: fm[0].coeffs):
            for _ in range(m):
                num = num * f.to_poly()
        return cls(num, tuple(sorted(bot.items(), key=lambda fm: fm[0].coeffs)), 1)

    @property
    def nvars(self) -> int:
        return self.numerator.nvars

    def den_degree(self) -> int:
        return sum(m for _, m in self.denominator)

    def degree_part(self, d: int) -> "FractionTerm":
        """The homogeneous degree-d part of the represented rational function."""
        return FractionTerm(self.numerator.homogeneous_component(d + self.den_degree()),
                            self.denominator, self.sign)

    def evaluate(self, point: Sequence[Coef]) -> Fraction:
        den = Fraction(self.sign)
        for f, m in self.denominator:
            den *= sum(c * x for c, x in zip(f.coeffs, point)) ** m
        return Fraction(self.numerator.evaluate(point)) / den


def _term_to_frac(t: FractionTerm) -> tuple[MultiPoly, Counter]:
    return t.numerator.scale(t.sign), Counter(dict(t.denominator))


def _cancel(num: MultiPoly, den: Counter) -> tuple[MultiPoly, Counter]:
    if num.is_zero():
        return num, Counter()
    den = Counter(den)
    for f in sorted(den, key=lambda f: f.coeffs):
        while den[f]:
            try:
                num = exact_div_linear(num, f)
            except NotDivisible:
                break
            den[f] -= 1
    return num, +den


def _merge(a: tuple[MultiPoly, Counter], b: tuple[MultiPoly, Counter], cancels=None):
    """Add two reduced fractions and cancel what can cancel.

    A form whose multiplicity differs between the two reduced denominators
    cannot divide the new numerator, so only equal-multiplicity forms are tried,
    and of those only the ones ``cancels`` accepts when it is given.
    """
    na, da = a
    nb, db = b
    if na.is_zero():
        return b
    if nb.is_zero():
        return a
    lcm = da | db
    for f, m in sorted((lcm - da).items(), key=lambda fm: fm[0].coeffs):
        for _ in range(m):
            na = na * f.to_poly()
    for f, m in sorted((lcm - db).items(), key=lambda fm: fm[0].coeffs):
        for _ in range(m):
            nb = nb * f.to_poly()
    num = na + nb
    shared = Counter({f: m for f, m in da.items()
                      if db.get(f) == m and (cancels is None or cancels(f))})
    num, left = _cancel(num, shared)
    return num, (lcm - shared) + left


class SumNode(list):
    """A nested group of summands with a hint about its complete sum.

    ``cancels(form)`` is false for forms that are expected to stay in the
    denominator of the group's sum, so no trial division is spent on them.
    A wrong hint only costs a final full reduction, never a wrong result.
    """

    def __init__(self, items=(), cancels=None):
        super().__init__(items)
        self.cancels = cancels


def _merge_level(level: list, cancels=None):
    # balanced pairwise merging; the hint only holds for the complete sum
    while len(level) > 1:
        last = len(level) == 2
        nxt = [_merge(level[i], level[i + 1], cancels if last else None)
               for i in range(0, len(level) - 1, 2)]
        if len(level) % 2:
            nxt.append(level[-1])
        level = nxt
    return level[0]


def combine_fractions(terms) -> tuple[MultiPoly, Counter]:
    """Exact sum as a fraction (numerator, denominator-form counts).

    ``terms`` is a sequence of FractionTerms or a nested list of them; each
    nested list is summed on its own first.  A flat sequence is merged as a
    balanced binary tree.  Shared factors are cancelled after every merge,
    so a grouping whose partial sums lose poles keeps the numerators small.
    """
    if isinstance(terms, FractionTerm):
        return _cancel(*_term_to_frac(terms))
    if not terms:
        raise ValueError("no terms")
    return _merge_level([combine_fractions(t) for t in terms], getattr(terms, "cancels", None))


def _is_leaf(x) -> bool:
    return not isinstance(x, (list, tuple))


def flatten_terms(tree) -> list[FractionTerm]:
    if _is_leaf(tree):
        return [tree]
    return [t for sub in tree for t in flatten_terms(sub)]


def map_terms(tree, fn):
    """Apply fn to every FractionTerm of a nested list, keeping the nesting."""
    if _is_leaf(tree):
        return fn(tree)
    return [map_terms(sub, fn) for sub in tree]


def _sum_chunks(terms, chunks: int) -> tuple[MultiPoly, Counter]:
    if chunks <= 1 or len(terms) <= 1:
        return combine_fractions(terms)
    size = -(-len(terms) // chunks)
    parts = [combine_fractions(terms[i:i + size]) for i in range(0, len(terms), size)]
    acc = parts[0]
    for p in parts[1:]:
        acc = _merge(acc, p)
    return acc


def _final_reduce(num: MultiPoly, den: Counter) -> tuple[MultiPoly, Counter]:
    # unreduced leaves or a cancellation hint can leave removable forms behind
    return _cancel(num, den) if den else (num, den)


def _require_polynomial(num: MultiPoly, den: Counter, what: str = "sum") -> MultiPoly:
    if den and not num.is_zero():
        forms = ", ".join(f"({f})^{m}" for f, m in den.items())
        raise NotPolynomial(f"{what} keeps denominator {forms}")
    return num


def _combine_degree(tree, d: int):
    # leaves are asked for their degree-d part only when reached, so a tree
    # of lazily built summands never holds more than one root-to-leaf path.
    # Leaves are not reduced: a failed trial division costs a full pass, and
    # summands rarely share a factor with their own denominator.
    if _is_leaf(tree):
        t = tree.degree_part(d)
        return None if t.numerator.is_zero() else _term_to_frac(t)
    level = [x for x in (_combine_degree(sub, d) for sub in tree) if x is not None]
    if not level:
        return None
    return _merge_level(level, getattr(tree, "cancels", None))


def _degree_sum(args) -> MultiPoly:
    tree, d, chunks, nvars = args
    if _is_leaf(tree):
        tree = [tree]
    if chunks > 1 and len(tree) > 1:
        size = -(-len(tree) // chunks)
        tree = [tree[i:i + size] for i in range(0, len(tree), size)]
    res = _combine_degree(tree, d)
    if res is None:
        return MultiPoly.zero(nvars)
    return _require_polynomial(*_final_reduce(*res), f"degree {d} part")


def sum_fractions(terms, degree_cap: int | None = None,
                  workers: int = 1, chunks: int = 1) -> MultiPoly:
    """Exact sum of fraction terms, certified to be a polynomial.

    ``terms`` may be nested lists (see ``combine_fractions``).  With
    ``degree_cap`` every homogeneous degree 0..cap is summed and certified
    on its own and higher degrees are ignored; the degrees may be farmed out
    to ``workers`` processes.  ``chunks`` splits the top level into groups
    reduced separately before the final merge.  The result is exact, so it
    does not depend on any of these choices.
    """
    flat = flatten_terms(terms)
    if not flat:
        raise ValueError("no terms")
    n = flat[0].nvars
    for t in flat:
        if t.nvars != n:
            raise ArityError("terms have different nvars")
    if isinstance(terms, FractionTerm):
        terms = [terms]
    if degree_cap is None:
        return _require_polynomial(*_final_reduce(*_sum_chunks(list(terms), chunks)))
    out = MultiPoly.zero(n)
    for r in sum_by_degree(terms, range(degree_cap + 1), workers, chunks).values():
        out = out + r
    return out


def sum_by_degree(terms, degrees: Iterable[int], workers: int = 1,
                  chunks: int = 1) -> dict[int, MultiPoly]:
    """{d: certified degree-d part of the sum} for the requested degrees."""
    flat = flatten_terms(terms)
    if not flat:
        raise ValueError("no terms")
    n = flat[0].nvars
    if isinstance(terms, FractionTerm):
        terms = [terms]
    degrees = list(degrees)
    jobs = [(terms, d, chunks, n) for d in degrees]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_degree_sum, jobs))
    else:
        results = [_degree_sum(j) for j in jobs]
    return dict(zip(degrees, results))


def elementary_symmetric(polys: Sequence[MultiPoly], nvars: int) -> list[MultiPoly]:
    """[e_0, e_1, ..., e_k] of the given polynomials."""
    e = [MultiPoly.const(nvars, 1)]
    for p in polys:
        e = [e[0]] + [e[i] + e[i - 1] * p for i in range(1, len(e))] + [e[-1] * p]
    return e


def coefficients_in(p: MultiPoly, var: int) -> dict[int, MultiPoly]:
    """p = sum_k C_k * t_var^k with C_k free of t_var; returns {k: C_k}."""
    s = SHIFT * (var - 1)
    step = (1 << s) | (1 << (SHIFT * p.nvars))
    out: dict[int, dict[int, Coef]] = {}
    for k, c in p.items():
        e = (k >> s) & MASK
        out.setdefault(e, {})[k - e * step] = c
    return {e: MultiPoly._raw(p.nvars, d) for e, d in out.items()}


def from_coefficients(coeffs: Mapping[int, MultiPoly], var: int, nvars: int) -> MultiPoly:
    s = SHIFT * (var - 1)
    step = (1 << s) | (1 << (SHIFT * nvars))
    out: dict[int, Coef] = {}
    for e, c in coeffs.items():
        for k, v in c.items():
            out[k + e * step] = out.get(k + e * step, 0) + v
    return MultiPoly(nvars, out)
