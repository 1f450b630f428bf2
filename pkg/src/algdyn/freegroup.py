"""Truncated group-ring arithmetic over free groups.

Words are tuples of nonzero integers (letter i is the i-th generator,
-i its inverse) kept in reduced form.  Coefficients are exact rationals:
the annihilator identity this module verifies involves powers of
1/(2d - 1), and the whole point of the check is exact cancellation.

The verified identity: with chi_n the sum of all reduced words of length
n in the free group of rank d, the series g = sum_n (-1)^n (2d-1)^{-n}
chi_{2n} satisfies g chi_1 = 0.  Truncating g at order N leaves the
product exactly zero on every word of length at most 2N-1 minus one, which
the report checks coefficient by coefficient.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .groupring import CapExceeded

Word = tuple[int, ...]


def reduce_word(w) -> Word:
    out: list[int] = []
    for a in w:
        a = int(a)
        if a == 0:
            raise ValueError("letters are nonzero integers")
        if out and out[-1] == -a:
            out.pop()
        else:
            out.append(a)
    return tuple(out)


def mul_words(a: Word, b: Word) -> Word:
    i = len(a)
    j = 0
    while i > 0 and j < len(b) and a[i - 1] == -b[j]:
        i -= 1
        j += 1
    return a[:i] + b[j:]


class FreeGroupRingElement:
    """Finitely supported rational function on a free group of rank d."""

    __slots__ = ("rank", "terms")

    def __init__(self, rank: int, terms=None):
        if rank < 1:
            raise ValueError("rank must be positive")
        self.rank = int(rank)
        clean: dict[Word, Fraction] = {}
        if terms:
            for w, c in terms.items():
                c = Fraction(c)
                if c == 0:
                    continue
                rw = reduce_word(w)
                if rw != tuple(w):
                    raise ValueError(f"word {w} is not reduced")
                for a in rw:
                    if abs(a) > rank:
                        raise ValueError(f"letter {a} outside rank {rank}")
                clean[rw] = c
        self.terms = clean

    @classmethod
    def delta(cls, rank: int) -> "FreeGroupRingElement":
        return cls(rank, {(): Fraction(1)})

    def __add__(self, other: "FreeGroupRingElement") -> "FreeGroupRingElement":
        if self.rank != other.rank:
            raise ValueError("rank mismatch")
        out = dict(self.terms)
        for w, c in other.terms.items():
            v = out.get(w, Fraction(0)) + c
            if v:
                out[w] = v
            else:
                del out[w]
        obj = FreeGroupRingElement.__new__(FreeGroupRingElement)
        obj.rank = self.rank
        obj.terms = out
        return obj

    def scale(self, c) -> "FreeGroupRingElement":
        c = Fraction(c)
        obj = FreeGroupRingElement.__new__(FreeGroupRingElement)
        obj.rank = self.rank
        obj.terms = {} if c == 0 else {w: v * c for w, v in self.terms.items()}
        return obj

    def l1_norm(self) -> Fraction:
        return sum((abs(c) for c in self.terms.values()), Fraction(0))

    def num_terms(self) -> int:
        return len(self.terms)

    def max_length(self) -> int:
        return max((len(w) for w in self.terms), default=0)

    def coefficient(self, w) -> Fraction:
        return self.terms.get(reduce_word(w), Fraction(0))

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, FreeGroupRingElement)
            and self.rank == other.rank
            and self.terms == other.terms
        )

    def __repr__(self) -> str:
        return f"FreeGroupRingElement(rank={self.rank}, {len(self.terms)} terms)"


def sphere_size(d: int, n: int) -> int:
    if n == 0:
        return 1
    return 2 * d * (2 * d - 1) ** (n - 1)


def sphere(d: int, n: int, cap: int = 5_000_000) -> FreeGroupRingElement:
    """Sum of all reduced words of length exactly n, each with coefficient 1."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    if sphere_size(d, n) > cap:
        raise CapExceeded(f"sphere of {sphere_size(d, n)} words exceeds cap {cap}")
    letters = [i for i in range(1, d + 1)] + [-i for i in range(1, d + 1)]
    words: list[Word] = [()]
    for _ in range(n):
        nxt: list[Word] = []
        for w in words:
            for a in letters:
                if not w or w[-1] != -a:
                    nxt.append(w + (a,))
        words = nxt
    obj = FreeGroupRingElement.__new__(FreeGroupRingElement)
    obj.rank = d
    obj.terms = {w: Fraction(1) for w in words}
    return obj


def mul_truncated(
    f: FreeGroupRingElement, g: FreeGroupRingElement, L: int
) -> FreeGroupRingElement:
    """Exact convolution keeping only words of length at most L.

    Pairs whose length gap already exceeds L are skipped: multiplying a
    word of length a by one of length b cannot produce anything shorter
    than |a - b|.
    """
    if f.rank != g.rank:
        raise ValueError("rank mismatch")
    out: dict[Word, Fraction] = {}
    for wa, ca in f.terms.items():
        la = len(wa)
        for wb, cb in g.terms.items():
            if abs(la - len(wb)) > L:
                continue
            w = mul_words(wa, wb)
            if len(w) > L:
                continue
            v = out.get(w, Fraction(0)) + ca * cb
            if v:
                out[w] = v
            else:
                del out[w]
    obj = FreeGroupRingElement.__new__(FreeGroupRingElement)
    obj.rank = f.rank
    obj.terms = out
    return obj


@dataclass
class AnnihilatorReport:
    rank: int
    order: int
    radius: int
    all_zero: bool
    nonzero_radii: list[int]
    checked_words: int

    def to_obj(self) -> dict:
        return {
            "rank": self.rank,
            "order": self.order,
            "radius": self.radius,
            "all_zero": self.all_zero,
            "nonzero_radii": self.nonzero_radii,
            "checked_words": self.checked_words,
        }


def annihilator_series(d: int, N: int, max_length: int | None = None, cap: int = 5_000_000) -> FreeGroupRingElement:
    """sum_{n<=N} (-1)^n (2d-1)^{-n} chi_{2n}, optionally cut at max_length.

    Cutting at max_length = L+1 is exact for products with chi_1 inspected
    on the ball of radius L: a length-2n word times a letter has length
    2n +- 1, so longer spheres cannot reach the ball.
    """
    acc = FreeGroupRingElement(d, {})
    base = Fraction(1, 2 * d - 1)
    for n in range(N + 1):
        if max_length is not None and 2 * n > max_length:
            break
        coef = (-1) ** n * base**n
        acc = acc + sphere(d, 2 * n, cap=cap).scale(coef)
    return acc


def verify_annihilator(d: int, N: int, L: int, cap: int = 5_000_000) -> AnnihilatorReport:
    """Check that the order-N annihilator series kills chi_1 on the ball of
    radius L, coefficient by exact coefficient."""
    if d < 2:
        raise ValueError("free-group rank must be at least 2")
    if N < 0 or L < 0:
        raise ValueError("N and L must be nonnegative")
    g = annihilator_series(d, N, max_length=L + 1, cap=cap)
    prod = mul_truncated(g, sphere(d, 1), L)
    nonzero = sorted({len(w) for w in prod.terms})
    checked = sum(sphere_size(d, r) for r in range(L + 1))
    return AnnihilatorReport(
        rank=d,
        order=N,
        radius=L,
        all_zero=not prod.terms,
        nonzero_radii=nonzero,
        checked_words=checked,
    )
