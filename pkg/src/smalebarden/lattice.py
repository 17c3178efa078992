"""Intersection lattices of the three base surfaces.

``CP2``, ``CP1xCP1`` and ``CP2 # k (-CP2)`` (``BlowUp(k)``), each in a fixed
unimodular basis with its canonical class. Divisor classes are integer
coefficient vectors in that basis. Also provides the GF(2) and GF(p) linear
algebra needed by the Seifert verifier.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from functools import cached_property, lru_cache, reduce
from math import gcd
from typing import Callable, Sequence


class SurfaceKind(enum.Enum):
    CP2 = "CP2"
    CP1xCP1 = "CP1xCP1"
    BLOWUP = "BlowUp"


class LatticeMismatch(ValueError):
    """Classes from different lattices were combined."""


class NonIntegralGenus(ValueError):
    """``K.D + D.D`` is odd, so no smooth curve represents the class."""


@dataclass(frozen=True)
class SurfaceLattice:
    kind: SurfaceKind
    blowups: int = 0
    b2: int = field(init=False, compare=False, repr=False)

    def __post_init__(self) -> None:
        if self.kind is SurfaceKind.BLOWUP:
            if self.blowups < 1:
                raise ValueError("BlowUp(k) needs k >= 1")
        elif self.blowups:
            raise ValueError(f"{self.kind.value} takes no blow-up count")
        b2 = {SurfaceKind.CP2: 1, SurfaceKind.CP1xCP1: 2}.get(self.kind, 1 + self.blowups)
        object.__setattr__(self, "b2", b2)

    @classmethod
    def cp2(cls) -> SurfaceLattice:
        return _interned(SurfaceKind.CP2, 0)

    @classmethod
    def cp1xcp1(cls) -> SurfaceLattice:
        return _interned(SurfaceKind.CP1xCP1, 0)

    @classmethod
    def blowup(cls, k: int) -> SurfaceLattice:
        return _interned(SurfaceKind.BLOWUP, k)

    @classmethod
    def parse(cls, text: str) -> SurfaceLattice:
        t = text.strip()
        if t == "CP2":
            return cls.cp2()
        if t == "CP1xCP1":
            return cls.cp1xcp1()
        if t.startswith("BlowUp(") and t.endswith(")"):
            try:
                return cls.blowup(int(t[7:-1]))
            except ValueError:
                pass
        raise ValueError(f"unknown surface {text!r}; expected CP2, CP1xCP1 or BlowUp(k)")

    @property
    def name(self) -> str:
        if self.kind is SurfaceKind.BLOWUP:
            return f"BlowUp({self.blowups})"
        return self.kind.value

    def __str__(self) -> str:
        return self.name

    @property
    def euler_characteristic(self) -> int:
        return 2 + self.b2

    @cached_property
    def basis_labels(self) -> tuple[str, ...]:
        if self.kind is SurfaceKind.CP2:
            return ("H",)
        if self.kind is SurfaceKind.CP1xCP1:
            return ("H1", "H2")
        if self.blowups == 1:
            return ("H", "E")
        return ("H",) + tuple(f"E{i}" for i in range(1, self.blowups + 1))

    @cached_property
    def gram(self) -> tuple[tuple[int, ...], ...]:
        n = self.b2
        if self.kind is SurfaceKind.CP1xCP1:
            return ((0, 1), (1, 0))
        return tuple(
            tuple((1 if i == 0 else -1) if i == j else 0 for j in range(n)) for i in range(n)
        )

    @cached_property
    def _entries(self) -> tuple[tuple[int, int, int], ...]:
        return tuple((i, j, v) for i, row in enumerate(self.gram) for j, v in enumerate(row) if v)

    @cached_property
    def canonical(self) -> DivisorClass:
        if self.kind is SurfaceKind.CP2:
            return self.cls(-3)
        if self.kind is SurfaceKind.CP1xCP1:
            return self.cls(-2, -2)
        return self.cls(-3, *([1] * self.blowups))

    @property
    def signature(self) -> tuple[int, int]:
        """Numbers of positive and negative eigenvalues of the form."""
        return 1, self.b2 - 1

    def cls(self, *coeffs: int) -> DivisorClass:
        return DivisorClass(self, tuple(coeffs))

    def zero(self) -> DivisorClass:
        return DivisorClass(self, (0,) * self.b2)

    def basis(self) -> tuple[DivisorClass, ...]:
        n = self.b2
        return tuple(self.cls(*(int(i == j) for j in range(n))) for i in range(n))

    def format_class(self, d: DivisorClass) -> str:
        terms = []
        for c, label in zip(d.coeffs, self.basis_labels):
            if c:
                mag = "" if abs(c) == 1 else str(abs(c))
                terms.append(("-" if c < 0 else "+") + mag + label)
        if not terms:
            return "0"
        text = "".join(terms)
        return text[1:] if text[0] == "+" else text


def determinant(matrix: Sequence[Sequence[int]]) -> int:
    """Exact integer determinant by fraction-free (Bareiss) elimination."""
    a = [list(row) for row in matrix]
    n = len(a)
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for r in range(k + 1, n):
                if a[r][k]:
                    a[k], a[r] = a[r], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1] if n else 1


@lru_cache(maxsize=None)
def _interned(kind: SurfaceKind, blowups: int) -> SurfaceLattice:
    # one shared instance per surface keeps the cached properties warm
    return SurfaceLattice(kind, blowups)


@dataclass(frozen=True)
class DivisorClass:
    lattice: SurfaceLattice
    coeffs: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.coeffs) != self.lattice.b2:
            raise ValueError(
                f"{self.lattice.name} classes have {self.lattice.b2} coefficients, got {len(self.coeffs)}"
            )

    def _check(self, other: DivisorClass) -> None:
        if self.lattice is not other.lattice and self.lattice != other.lattice:
            raise LatticeMismatch(f"{self.lattice.name} vs {other.lattice.name}")

    def __add__(self, other: DivisorClass) -> DivisorClass:
        self._check(other)
        return DivisorClass(self.lattice, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def __sub__(self, other: DivisorClass) -> DivisorClass:
        self._check(other)
        return DivisorClass(self.lattice, tuple(a - b for a, b in zip(self.coeffs, other.coeffs)))

    def __neg__(self) -> DivisorClass:
        return DivisorClass(self.lattice, tuple(-a for a in self.coeffs))

    def __mul__(self, n: int) -> DivisorClass:
        return DivisorClass(self.lattice, tuple(n * a for a in self.coeffs))

    __rmul__ = __mul__

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def __str__(self) -> str:
        return self.lattice.format_class(self)


def intersect(a: DivisorClass, b: DivisorClass) -> int:
    a._check(b)
    x, y = a.coeffs, b.coeffs
    if a.lattice.kind is SurfaceKind.CP1xCP1:
        return x[0] * y[1] + x[1] * y[0]
    # diag(1, -1, ..., -1)
    return 2 * x[0] * y[0] - sum(map(int.__mul__, x, y))


def adjunction_genus(d: DivisorClass) -> int:
    """Genus of a smooth connected curve in class ``d``: ``2g - 2 = K.D + D.D``."""
    twice = intersect(d.lattice.canonical, d) + intersect(d, d)
    if twice % 2:
        raise NonIntegralGenus(f"K.D + D.D = {twice} is odd for D = {d}")
    return twice // 2 + 1


def divisibility(d: DivisorClass) -> int:
    """Largest ``n`` with ``d = n * d'`` for an integral ``d'`` (0 for the zero class)."""
    return reduce(gcd, d.coeffs, 0)


def is_primitive(d: DivisorClass) -> bool:
    return divisibility(d) == 1


def is_ample(d: DivisorClass) -> bool:
    """Sufficient ampleness test for integral classes.

    CP2: ``aH`` with ``a > 0``. CP1xCP1: both coefficients positive.
    BlowUp(k): ``aH - sum b_i E_i`` with every ``b_i > 0`` and ``a > sum b_i``.
    """
    return ample_coefficients(d.lattice.kind, d.coeffs)


def ample_coefficients(kind: SurfaceKind, c: Sequence[int]) -> bool:
    """:func:`is_ample` on a bare coefficient vector."""
    if kind is SurfaceKind.CP2:
        return c[0] > 0
    if kind is SurfaceKind.CP1xCP1:
        return c[0] > 0 and c[1] > 0
    b = [-x for x in c[1:]]
    return all(x > 0 for x in b) and c[0] > sum(b)


def _ample_functionals(kind: SurfaceKind, c: Sequence[int]) -> list[int]:
    """The values that :func:`ample_coefficients` requires to be positive."""
    if kind is SurfaceKind.CP2:
        return [c[0]]
    if kind is SurfaceKind.CP1xCP1:
        return [c[0], c[1]]
    return [-x for x in c[1:]] + [sum(c)]


def ample_threshold(d: DivisorClass, shift: DivisorClass) -> int | None:
    """Smallest ``s >= 1`` with ``s * d - shift`` ample (every larger ``s`` works too).

    None when large multiples are never ample.
    """
    d._check(shift)
    kind = d.lattice.kind
    s = 1
    for u, v in zip(_ample_functionals(kind, d.coeffs), _ample_functionals(kind, shift.coeffs)):
        # need s * u > v
        if u <= 0:
            if v >= 0 or u < 0:
                return None
            continue
        s = max(s, v // u + 1)
    return s


@dataclass(frozen=True)
class RationalClass:
    """``numerator / denominator`` in lowest terms, denominator positive."""

    numerator: DivisorClass
    denominator: int

    @classmethod
    def make(cls, numerator: DivisorClass, denominator: int) -> RationalClass:
        if denominator == 0:
            raise ZeroDivisionError("denominator must be non-zero")
        if denominator < 0:
            numerator, denominator = -numerator, -denominator
        g = gcd(divisibility(numerator), denominator)
        if g > 1:
            numerator = DivisorClass(numerator.lattice, tuple(c // g for c in numerator.coeffs))
            denominator //= g
        return cls(numerator, denominator)

    def __str__(self) -> str:
        if self.denominator == 1:
            return str(self.numerator)
        return f"({self.numerator})/{self.denominator}"


# -- linear algebra mod p ---------------------------------------------------


def _bits(d: DivisorClass) -> int:
    return sum(1 << i for i, c in enumerate(d.coeffs) if c & 1)


def _reduce(v: int, basis: dict[int, int]) -> int:
    while v:
        top = v.bit_length() - 1
        row = basis.get(top)
        if row is None:
            return v
        v ^= row
    return 0


def _f2_basis(generators: Sequence[DivisorClass]) -> dict[int, int]:
    basis: dict[int, int] = {}
    for g in generators:
        v = _reduce(_bits(g), basis)
        if v:
            basis[v.bit_length() - 1] = v
    return basis


def _same_lattice(v: DivisorClass | None, generators: Sequence[DivisorClass]) -> None:
    classes = ([v] if v is not None else []) + list(generators)
    for g in classes[1:]:
        classes[0]._check(g)


def f2_rank(generators: Sequence[DivisorClass]) -> int:
    """Rank over GF(2) of the classes reduced mod 2."""
    _same_lattice(None, generators)
    return len(_f2_basis(generators))


def f2_span_membership(v: DivisorClass, generators: Sequence[DivisorClass]) -> bool:
    """Whether ``v`` mod 2 lies in the GF(2)-span of the generators mod 2."""
    _same_lattice(v, generators)
    return _reduce(_bits(v), _f2_basis(generators)) == 0


def fp_rank(generators: Sequence[DivisorClass], p: int) -> int:
    """Rank over GF(p) of the classes reduced mod the prime ``p``."""
    if p == 2:
        return f2_rank(generators)
    _same_lattice(None, generators)
    if len(generators) == 1:
        return int(any(c % p for c in generators[0].coeffs))
    rows = [[c % p for c in g.coeffs] for g in generators]
    rank = 0
    ncols = len(rows[0]) if rows else 0
    for col in range(ncols):
        pivot = next((r for r in range(rank, len(rows)) if rows[r][col]), None)
        if pivot is None:
            continue
        rows[rank], rows[pivot] = rows[pivot], rows[rank]
        inv = pow(rows[rank][col], -1, p)
        rows[rank] = [x * inv % p for x in rows[rank]]
        for r in range(len(rows)):
            if r != rank and rows[r][col]:
                f = rows[r][col]
                rows[r] = [(x - f * y) % p for x, y in zip(rows[r], rows[rank])]
        rank += 1
    return rank


# -- blowing up a point -----------------------------------------------------


def blowup_embedding(
    lattice: SurfaceLattice,
) -> tuple[SurfaceLattice, Callable[[DivisorClass], DivisorClass], DivisorClass]:
    """Blow up one point away from everything.

    Returns the new lattice, the isometric embedding of old classes, and the
    new exceptional class. ``CP1xCP1`` blown up once is presented as
    ``BlowUp(2)`` via ``H1 -> H - E1``, ``H2 -> H - E2``, exceptional
    ``H - E1 - E2``.
    """
    if lattice.kind is SurfaceKind.CP1xCP1:
        new = SurfaceLattice.blowup(2)

        def embed(d: DivisorClass) -> DivisorClass:
            a1, a2 = d.coeffs
            return new.cls(a1 + a2, -a1, -a2)

        return new, embed, new.cls(1, -1, -1)
    k = lattice.blowups if lattice.kind is SurfaceKind.BLOWUP else 0
    new = SurfaceLattice.blowup(k + 1)

    def embed(d: DivisorClass) -> DivisorClass:
        return DivisorClass(new, d.coeffs + (0,))

    return new, embed, new.cls(*([0] * (k + 1) + [1]))
