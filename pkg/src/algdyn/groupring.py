"""Exact arithmetic in the integral group ring of Z^d.

Elements are integer-coefficient Laurent polynomials in d commuting
variables u1..ud, stored sparsely as a mapping from exponent vectors to
nonzero integer coefficients.  Everything here is exact: coefficients are
arbitrary-precision integers and norms are integers, which is what the
certification layers downstream rely on.
"""

from __future__ import annotations

import json
import re
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Sequence


class DimensionMismatch(ValueError):
    """Operands live over different Z^d."""


class CapExceeded(RuntimeError):
    """An exact computation exceeded a declared size cap."""


def _as_exponent(e, d: int) -> tuple[int, ...]:
    if isinstance(e, int):
        if d != 1:
            raise ValueError("bare integer exponent only valid when d=1")
        return (e,)
    t = tuple(int(v) for v in e)
    if len(t) != d:
        raise ValueError(f"exponent {t} has length {len(t)}, expected {d}")
    return t


class GroupRingElement:
    """An element of Z[u1^±1, ..., ud^±1] with finite support."""

    __slots__ = ("d", "terms")

    def __init__(self, d: int, terms: Mapping | None = None):
        if d < 1:
            raise ValueError("dimension must be a positive integer")
        self.d = int(d)
        clean: dict[tuple[int, ...], int] = {}
        if terms:
            for e, c in terms.items():
                c = int(c)
                if c == 0:
                    continue
                clean[_as_exponent(e, d)] = c
        self.terms = clean

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls, d: int) -> "GroupRingElement":
        return cls(d, {})

    @classmethod
    def constant(cls, d: int, c: int) -> "GroupRingElement":
        return cls(d, {(0,) * d: int(c)})

    @classmethod
    def one(cls, d: int) -> "GroupRingElement":
        return cls.constant(d, 1)

    @classmethod
    def monomial(cls, d: int, exponent, coef: int = 1) -> "GroupRingElement":
        return cls(d, {_as_exponent(exponent, d): int(coef)})

    @classmethod
    def variable(cls, d: int, index: int, power: int = 1) -> "GroupRingElement":
        """u_index^power, index in 1..d."""
        if not 1 <= index <= d:
            raise ValueError(f"variable index {index} out of range 1..{d}")
        e = [0] * d
        e[index - 1] = power
        return cls(d, {tuple(e): 1})

    # -- ring operations ---------------------------------------------------

    def _check(self, other: "GroupRingElement") -> None:
        if self.d != other.d:
            raise DimensionMismatch(f"dimensions differ: {self.d} vs {other.d}")

    def __add__(self, other) -> "GroupRingElement":
        if isinstance(other, int):
            other = GroupRingElement.constant(self.d, other)
        self._check(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            v = out.get(e, 0) + c
            if v:
                out[e] = v
            else:
                out.pop(e, None)
        return GroupRingElement(self.d, out)

    __radd__ = __add__

    def __neg__(self) -> "GroupRingElement":
        return GroupRingElement(self.d, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other) -> "GroupRingElement":
        if isinstance(other, int):
            other = GroupRingElement.constant(self.d, other)
        return self + (-other)

    def __rsub__(self, other) -> "GroupRingElement":
        return (-self) + other

    def __mul__(self, other) -> "GroupRingElement":
        if isinstance(other, int):
            if other == 0:
                return GroupRingElement.zero(self.d)
            return GroupRingElement(self.d, {e: c * other for e, c in self.terms.items()})
        self._check(other)
        # convolution; iterate the smaller support outside
        a, b = (self.terms, other.terms) if len(self.terms) <= len(other.terms) else (other.terms, self.terms)
        out: dict[tuple[int, ...], int] = {}
        for ea, ca in a.items():
            for eb, cb in b.items():
                k = tuple(x + y for x, y in zip(ea, eb))
                v = out.get(k, 0) + ca * cb
                if v:
                    out[k] = v
                else:
                    del out[k]
        return GroupRingElement(self.d, out)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "GroupRingElement":
        if n < 0:
            raise ValueError("negative powers are not ring elements; use torus.l1_inverse")
        result = GroupRingElement.one(self.d)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base if n > 1 else base
            n >>= 1
        return result

    def star(self) -> "GroupRingElement":
        """Involution: reflect every exponent vector through the origin."""
        return GroupRingElement(self.d, {tuple(-x for x in e): c for e, c in self.terms.items()})

    def shift(self, t) -> "GroupRingElement":
        """Multiply by the monomial u^t."""
        t = _as_exponent(t, self.d)
        return GroupRingElement(self.d, {tuple(x + y for x, y in zip(e, t)): c for e, c in self.terms.items()})

    # -- inspection --------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def l1_norm(self) -> int:
        return sum(abs(c) for c in self.terms.values())

    def linf_norm(self) -> int:
        return max((abs(c) for c in self.terms.values()), default=0)

    def support(self) -> list[tuple[int, ...]]:
        return sorted(self.terms)

    def support_radius(self) -> int:
        """Max-norm radius of the support (0 for the zero element)."""
        return max((max(abs(x) for x in e) for e in self.terms), default=0)

    def coefficient(self, e) -> int:
        return self.terms.get(_as_exponent(e, self.d), 0)

    def coefficient_sum(self) -> int:
        """Exact value of the Fourier series at the zero frequency."""
        return sum(self.terms.values())

    def num_terms(self) -> int:
        return len(self.terms)

    def __eq__(self, other) -> bool:
        if isinstance(other, int):
            return self == GroupRingElement.constant(self.d, other)
        return isinstance(other, GroupRingElement) and self.d == other.d and self.terms == other.terms

    def __hash__(self) -> int:
        return hash((self.d, tuple(sorted(self.terms.items()))))

    # -- text / JSON forms -------------------------------------------------

    def __repr__(self) -> str:
        return f"GroupRingElement({self.format()!r}, d={self.d})"

    def format(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for e in sorted(self.terms, key=lambda t: (sum(abs(x) for x in t), t)):
            c = self.terms[e]
            mono = "*".join(
                f"u{i+1}" + (f"^{p}" if p != 1 else "")
                for i, p in enumerate(e)
                if p != 0
            )
            if not mono:
                body = str(abs(c))
            elif abs(c) == 1:
                body = mono
            else:
                body = f"{abs(c)}*{mono}"
            sign = "-" if c < 0 else "+"
            parts.append((sign, body))
        first_sign, first_body = parts[0]
        out = ("-" if first_sign == "-" else "") + first_body
        for sign, body in parts[1:]:
            out += f" {sign} {body}"
        return out

    def to_obj(self) -> dict:
        return {
            "d": self.d,
            "terms": [{"exp": list(e), "coef": self.terms[e]} for e in sorted(self.terms)],
        }

    @classmethod
    def from_obj(cls, obj) -> "GroupRingElement":
        if isinstance(obj, str):
            return parse_element(obj)
        d = int(obj["d"])
        return cls(d, {tuple(t["exp"]): int(t["coef"]) for t in obj["terms"]})

    def to_json(self) -> str:
        return json.dumps(self.to_obj(), sort_keys=True)


_TOKEN = re.compile(r"\s*([+-]|\*|\d+|u\d*(?:\^-?\d+)?)")


def parse_element(text: str, d: int | None = None) -> GroupRingElement:
    """Parse expressions like "3 - u1 - u1^-1" or "4 - u1 - u2^-1".

    Grammar: terms joined by +/-, each term a product (optional '*') of an
    integer coefficient and variable powers u<k>^<e>.  A bare "u" means u1.
    """
    pos = 0
    tokens: list[str] = []
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ValueError(f"parse error at position {pos}: {text[pos:pos+10]!r}")
        tokens.append(m.group(1))
        pos = m.end()
    # first pass: find dimension
    max_var = 0
    for t in tokens:
        if t.startswith("u"):
            head = t.split("^")[0]
            idx = int(head[1:]) if len(head) > 1 else 1
            max_var = max(max_var, idx)
    if d is None:
        d = max(max_var, 1)
    elif max_var > d:
        raise ValueError(f"variable u{max_var} exceeds declared dimension {d}")

    terms: dict[tuple[int, ...], int] = {}
    i = 0
    n = len(tokens)
    while i < n:
        sign = 1
        if tokens[i] in "+-":
            if tokens[i] == "-":
                sign = -1
            i += 1
            if i < n and tokens[i] in "+-":
                raise ValueError("consecutive signs in expression")
        if i >= n:
            raise ValueError("dangling sign at end of expression")
        coef = sign
        exp = [0] * d
        saw_factor = False
        while i < n and tokens[i] not in "+-":
            t = tokens[i]
            if t == "*":
                i += 1
                continue
            if t.isdigit():
                coef *= int(t)
            else:
                head, _, p = t.partition("^")
                idx = int(head[1:]) if len(head) > 1 else 1
                exp[idx - 1] += int(p) if p else 1
            saw_factor = True
            i += 1
        if not saw_factor:
            raise ValueError("empty term")
        k = tuple(exp)
        v = terms.get(k, 0) + coef
        if v:
            terms[k] = v
        else:
            terms.pop(k, None)
    return GroupRingElement(d, terms)


class GroupRingMatrix:
    """Rectangular matrix over GroupRingElement with a shared dimension d."""

    __slots__ = ("rows", "cols", "d", "entries")

    def __init__(self, entries: Sequence[Sequence[GroupRingElement]]):
        if not entries or not entries[0]:
            raise ValueError("matrix must be nonempty")
        self.rows = len(entries)
        self.cols = len(entries[0])
        d = entries[0][0].d
        for row in entries:
            if len(row) != self.cols:
                raise ValueError("ragged matrix")
            for e in row:
                if e.d != d:
                    raise DimensionMismatch("matrix entries live over different Z^d")
        self.d = d
        self.entries = [list(row) for row in entries]

    @classmethod
    def identity(cls, k: int, d: int) -> "GroupRingMatrix":
        one = GroupRingElement.one(d)
        zero = GroupRingElement.zero(d)
        return cls([[one if i == j else zero for j in range(k)] for i in range(k)])

    @classmethod
    def from_obj(cls, obj, d: int | None = None) -> "GroupRingMatrix":
        rows = []
        for row in obj:
            rows.append([
                e if isinstance(e, GroupRingElement)
                else parse_element(e, d) if isinstance(e, str)
                else GroupRingElement.from_obj(e)
                for e in row
            ])
        dd = d or max(e.d for row in rows for e in row)
        norm = [[e if e.d == dd else GroupRingElement(dd, {(_pad(k, dd)): c for k, c in e.terms.items()}) for e in row] for row in rows]
        return cls(norm)

    def to_obj(self) -> list:
        return [[e.to_obj() for e in row] for row in self.entries]

    def __getitem__(self, ij) -> GroupRingElement:
        i, j = ij
        return self.entries[i][j]

    def is_square(self) -> bool:
        return self.rows == self.cols

    def star(self) -> "GroupRingMatrix":
        """Involution: transpose and reflect every entry."""
        return GroupRingMatrix(
            [[self.entries[j][i].star() for j in range(self.rows)] for i in range(self.cols)]
        )

    def __add__(self, other: "GroupRingMatrix") -> "GroupRingMatrix":
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ValueError("shape mismatch")
        return GroupRingMatrix(
            [[self.entries[i][j] + other.entries[i][j] for j in range(self.cols)] for i in range(self.rows)]
        )

    def __mul__(self, other: "GroupRingMatrix") -> "GroupRingMatrix":
        if self.cols != other.rows:
            raise ValueError("shape mismatch")
        out = []
        for i in range(self.rows):
            row = []
            for j in range(other.cols):
                acc = GroupRingElement.zero(self.d)
                for t in range(self.cols):
                    acc = acc + self.entries[i][t] * other.entries[t][j]
                row.append(acc)
            out.append(row)
        return GroupRingMatrix(out)

    def l1_norm(self) -> int:
        return sum(e.l1_norm() for row in self.entries for e in row)

    def det(self, term_cap: int = 200_000) -> GroupRingElement:
        """Exact determinant by minor expansion with column-subset memoization."""
        if not self.is_square():
            raise ValueError("determinant of a non-square matrix")
        k = self.rows
        memo: dict[tuple[int, ...], GroupRingElement] = {(): GroupRingElement.one(self.d)}

        def minor(cols: tuple[int, ...]) -> GroupRingElement:
            if cols in memo:
                return memo[cols]
            i = k - len(cols)  # expand along row i
            acc = GroupRingElement.zero(self.d)
            for pos, j in enumerate(cols):
                e = self.entries[i][j]
                if e.is_zero():
                    continue
                sub = minor(tuple(c for c in cols if c != j))
                term = e * sub
                acc = acc + (term if pos % 2 == 0 else -term)
                if acc.num_terms() > term_cap:
                    raise CapExceeded("determinant support exceeds size cap")
            memo[cols] = acc
            return acc

        return minor(tuple(range(k)))

    def adjugate(self) -> "GroupRingMatrix":
        """adj(A) with A*adj(A) = adj(A)*A = det(A)*I (commutative base ring)."""
        if not self.is_square():
            raise ValueError("adjugate of a non-square matrix")
        k = self.rows
        if k == 1:
            return GroupRingMatrix([[GroupRingElement.one(self.d)]])
        out = [[None] * k for _ in range(k)]
        for i in range(k):
            for j in range(k):
                sub = [
                    [self.entries[r][c] for c in range(k) if c != j]
                    for r in range(k) if r != i
                ]
                m = GroupRingMatrix(sub).det()
                out[j][i] = m if (i + j) % 2 == 0 else -m
        return GroupRingMatrix(out)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, GroupRingMatrix)
            and self.entries == other.entries
        )

    def __hash__(self) -> int:
        return hash(tuple(tuple(row) for row in self.entries))

    def __repr__(self) -> str:
        body = "; ".join(", ".join(e.format() for e in row) for row in self.entries)
        return f"GroupRingMatrix[{body}]"


def _pad(e: tuple[int, ...], d: int) -> tuple[int, ...]:
    return e + (0,) * (d - len(e))


class TorusPoint:
    """A point of the d-torus, coordinates stored canonically in [0, 1)."""

    __slots__ = ("theta",)

    def __init__(self, theta: Iterable[float]):
        self.theta = tuple(float(t) % 1.0 for t in theta)

    def __len__(self) -> int:
        return len(self.theta)

    def __iter__(self):
        return iter(self.theta)

    def __repr__(self) -> str:
        return f"TorusPoint{self.theta}"


def circle_dist(a, b=0) -> float:
    """Distance on R/Z: min over integers m of |a - b - m|."""
    t = float(a) - float(b)
    t -= round(t)
    return abs(t)


def torus_distance(x: Sequence, y: Sequence) -> float:
    """Max-metric distance on the k-torus, with per-coordinate wraparound."""
    xs = list(x.theta if isinstance(x, TorusPoint) else x)
    ys = list(y.theta if isinstance(y, TorusPoint) else y)
    if len(xs) != len(ys):
        raise ValueError(f"length mismatch: {len(xs)} vs {len(ys)}")
    return max((circle_dist(a, b) for a, b in zip(xs, ys)), default=0.0)


def frac_center(v) -> Fraction | float:
    """Reduce mod 1 to the representative in [-1/2, 1/2); exact on Fractions."""
    if isinstance(v, Fraction):
        return v - (v + Fraction(1, 2)).__floor__()
    t = float(v)
    r = t - round(t)
    if r == 0.5:
        r = -0.5
    return r


def enumerate_zd(d: int) -> Iterator[tuple[int, ...]]:
    """Deterministic spiral enumeration of Z^d: max-norm shells, lex inside."""
    yield (0,) * d
    r = 1
    while True:
        shell = sorted(
            e for e in _box(d, r) if max(abs(x) for x in e) == r
        )
        for e in shell:
            yield e
        r += 1


def _box(d: int, r: int) -> Iterator[tuple[int, ...]]:
    if d == 0:
        yield ()
        return
    for head in range(-r, r + 1):
        for rest in _box(d - 1, r):
            yield (head,) + rest


def ball(d: int, r: int) -> list[tuple[int, ...]]:
    """All lattice points with max-norm at most r, sorted."""
    return sorted(_box(d, r))
