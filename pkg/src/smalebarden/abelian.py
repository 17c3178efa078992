"""Second-homology data of simply connected 5-manifolds.

Holds the homological fingerprint ``(H_2(M, Z), i(M))``, its primary
decomposition, the Barden normal form ``M_{j;k_1,...,k_s;r}`` and the purely
group-theoretic necessary conditions (G-K, the "all but ten" triangular-number
condition for rational homology spheres and its coprime refinement).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import cached_property, lru_cache
from math import gcd, isqrt, prod
from typing import Iterable, Union

from sympy import factorint


class Inf(enum.Enum):
    """The value infinity of the Barden invariant."""

    INF = "inf"

    def __repr__(self) -> str:
        return "INF"

    def __str__(self) -> str:
        return "inf"


INF = Inf.INF

BardenIndex = Union[int, Inf]


def parse_barden(text: str) -> BardenIndex:
    """Parse ``"0"``, ``"inf"`` or a non-negative integer."""
    t = text.strip().lower()
    if t in ("inf", "infinity", "oo", "∞"):
        return INF
    try:
        value = int(t)
    except ValueError:
        raise ValueError(f"Barden invariant must be a non-negative integer or 'inf', got {text!r}") from None
    if value < 0:
        raise ValueError(f"Barden invariant must be non-negative, got {value}")
    return value


def format_barden(i: BardenIndex | None) -> str:
    return "?" if i is None else str(i)


@dataclass(frozen=True)
class CheckResult:
    """Outcome of a necessary-condition check.

    ``clause`` names the first violated clause when ``passed`` is false;
    ``witness`` carries the offending data.
    """

    passed: bool
    clause: str | None = None
    detail: str = ""
    witness: tuple = ()

    def __bool__(self) -> bool:
        return self.passed


@dataclass(frozen=True, order=True)
class TorsionSummand:
    """``count`` copies of the cyclic group of order ``m``."""

    m: int
    count: int

    def __post_init__(self) -> None:
        if not isinstance(self.m, int) or self.m < 2:
            raise ValueError(f"torsion order must be >= 2, got {self.m!r}")
        if not isinstance(self.count, int) or self.count < 1:
            raise ValueError(f"torsion multiplicity must be >= 1, got {self.count!r}")

    def __str__(self) -> str:
        return f"{self.m}^{self.count}"


@lru_cache(maxsize=None)
def factor(n: int) -> tuple[tuple[int, int], ...]:
    """Prime factorization of ``n`` as sorted ``(p, exponent)`` pairs."""
    return tuple(sorted(factorint(n).items()))


def _canonical_torsion(raw: Iterable) -> tuple[TorsionSummand, ...]:
    if type(raw) is tuple and all(type(t) is TorsionSummand for t in raw) and all(
        a.m < b.m for a, b in zip(raw, raw[1:])
    ):
        return raw
    merged: dict[int, int] = {}
    for item in raw:
        if isinstance(item, TorsionSummand):
            m, count = item.m, item.count
        else:
            m, count = item
            if type(m) is not int or type(count) is not int or m < 2 or count < 1:
                TorsionSummand(m, count)  # raises with the standard message
        merged[m] = merged.get(m, 0) + count
    return tuple(TorsionSummand(m, c) for m, c in sorted(merged.items()))


@dataclass(frozen=True, eq=False)
class H2Data:
    """``H_2(M, Z) = Z^rank + torsion`` together with the Barden invariant.

    The torsion is kept merged by order and sorted. Equality and hashing
    compare the underlying groups up to isomorphism, so ``Z_6^2`` equals
    ``Z_2^2 + Z_3^2``. ``barden_i`` may be ``None`` when only the group is
    known (for example the homology of a Seifert total space before w2 is
    computed).
    """

    rank: int
    torsion: tuple[TorsionSummand, ...] = ()
    barden_i: BardenIndex | None = 0

    def __post_init__(self) -> None:
        if not isinstance(self.rank, int) or self.rank < 0:
            raise ValueError(f"rank must be a non-negative integer, got {self.rank!r}")
        i = self.barden_i
        if i is not None and i is not INF and (not isinstance(i, int) or i < 0):
            raise ValueError(f"Barden invariant must be a non-negative integer or INF, got {i!r}")
        object.__setattr__(self, "torsion", _canonical_torsion(self.torsion))

    @cached_property
    def _primary(self) -> tuple[tuple[int, tuple[tuple[int, int], ...]], ...]:
        out: dict[int, dict[int, int]] = {}
        for t in self.torsion:
            for p, a in factor(t.m):
                exps = out.setdefault(p, {})
                exps[a] = exps.get(a, 0) + t.count
        return tuple((p, tuple(sorted(e.items()))) for p, e in sorted(out.items()))

    @cached_property
    def _key(self):
        return (self.rank, self._primary, self.barden_i)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, H2Data):
            return NotImplemented
        if (self.rank, self.torsion, self.barden_i) == (other.rank, other.torsion, other.barden_i):
            return True
        return self._key == other._key

    def __hash__(self) -> int:
        return hash(self._key)

    @property
    def torsion_free(self) -> bool:
        return not self.torsion

    @property
    def spin(self) -> bool | None:
        if self.barden_i is None:
            return None
        return self.barden_i == 0

    def torsion_text(self) -> str:
        return ",".join(str(t) for t in self.torsion)

    def __str__(self) -> str:
        parts = [f"Z^{self.rank}"] if self.rank else []
        parts += [f"Z_{t.m}^{t.count}" for t in self.torsion]
        group = " + ".join(parts) if parts else "0"
        return f"H2 = {group}, i = {format_barden(self.barden_i)}"


def normalize(raw, rank: int = 0, barden_i: BardenIndex | None = 0) -> H2Data:
    """Canonical :class:`H2Data` from ``(order, multiplicity)`` pairs.

    Duplicate orders are merged by summing multiplicities and the result is
    sorted by order. An :class:`H2Data` argument is returned in canonical form
    unchanged (so the operation is idempotent).
    """
    if isinstance(raw, H2Data):
        return H2Data(raw.rank, raw.torsion, raw.barden_i)
    return H2Data(rank, tuple(raw), barden_i)


def primary_decomposition(h: H2Data | Iterable) -> dict[int, dict[int, int]]:
    """Map ``p -> {i -> c(p^i)}`` for the torsion of ``h``.

    Each ``Z_m`` with ``m = prod p^a`` splits as ``prod Z_{p^a}``.
    """
    if isinstance(h, H2Data):
        return {p: dict(e) for p, e in h._primary}
    torsion = _canonical_torsion(h)
    out: dict[int, dict[int, int]] = {}
    for t in torsion:
        for p, a in factor(t.m):
            exps = out.setdefault(p, {})
            exps[a] = exps.get(a, 0) + t.count
    return {p: dict(sorted(e.items())) for p, e in sorted(out.items())}


def torsion_order(h: H2Data) -> int:
    return prod(t.m ** t.count for t in h.torsion)


def mod2_dimension(h: H2Data) -> int:
    """``dim Hom(H_2, Z_2)``: the free rank plus the number of even cyclic factors."""
    return h.rank + sum(t.count for t in h.torsion if t.m % 2 == 0)


def t_invariants(h: H2Data) -> tuple[dict[int, int], int]:
    """``t(p)``, the number of distinct exponents at ``p``, and their maximum."""
    t = {p: len(exps) for p, exps in primary_decomposition(h).items()}
    return t, max(t.values(), default=0)


def gk_check(h: H2Data) -> CheckResult:
    """Condition G-K: ``i in {0, inf}``, ``t(p) <= k+1``, and ``t(2) <= k`` if ``i = inf``."""
    if h.barden_i not in (0, INF):
        return CheckResult(False, "GK-1", f"i(M) = {format_barden(h.barden_i)} is not 0 or inf")
    t, _ = t_invariants(h)
    for p, tp in t.items():
        if tp > h.rank + 1:
            return CheckResult(False, "GK-2", f"t({p}) = {tp} > k+1 = {h.rank + 1}", (p, tp))
    if h.barden_i is INF and t.get(2, 0) > h.rank:
        return CheckResult(False, "GK-3", f"i(M) = inf and t(2) = {t[2]} > k = {h.rank}", (2, t[2]))
    return CheckResult(True, detail="all three clauses hold")


# -- Barden normal form -----------------------------------------------------


@dataclass(frozen=True)
class BardenName:
    """The manifold ``M_{j;k_1,...,k_s;r} = X_j # r M_inf # M_{k_1} # ... # M_{k_s}``."""

    j: BardenIndex
    chain: tuple[int, ...] = ()
    r: int = 0

    def __post_init__(self) -> None:
        if self.j is not INF and (not isinstance(self.j, int) or self.j < -1):
            raise ValueError(f"bad X_j index {self.j!r}")
        if any(k <= 1 for k in self.chain):
            raise ValueError("chain entries must exceed 1")
        if any(b % a for a, b in zip(self.chain, self.chain[1:])):
            raise ValueError(f"chain {self.chain} is not a divisor chain")
        if self.r < 0:
            raise ValueError("r must be non-negative")

    def h2(self) -> H2Data:
        """Second homology and Barden invariant read off from the summands."""
        rank, torsion, i = self.r, [(k, 2) for k in self.chain], 0
        if self.j == -1:
            torsion.append((2, 1))
            i = 1
        elif self.j is INF:
            rank += 1
            i = INF
        elif self.j > 0:
            torsion.append((2 ** self.j, 2))
            i = self.j
        return normalize(torsion, rank, i)

    def summands(self) -> str:
        parts = [f"X_{self.j}"] if self.j != 0 else []
        if self.r:
            parts.append(f"{self.r} M_inf" if self.r > 1 else "M_inf")
        parts += [f"M_{k}" for k in self.chain]
        return " # ".join(parts) if parts else "S^5"

    def __str__(self) -> str:
        return f"M_{{{self.j};{','.join(map(str, self.chain))};{self.r}}}"


class NotRealizable(ValueError):
    """No simply connected 5-manifold has the given ``(H_2, i)``."""


def invariant_factors(prim: dict[int, dict[int, int]]) -> tuple[int, ...]:
    """Invariant factors ``d_1 | d_2 | ...`` of a group given by its primary decomposition."""
    columns = []
    for p, exps in prim.items():
        powers = sorted((p ** a for a, c in exps.items() for _ in range(c)), reverse=True)
        columns.append(powers)
    n = max((len(c) for c in columns), default=0)
    factors = [prod(col[t] for col in columns if t < len(col)) for t in range(n)]
    return tuple(reversed(factors))


def _paired_chain(prim: dict[int, dict[int, int]]) -> tuple[int, ...] | None:
    """Chain ``k_1 | ... | k_s`` with torsion ``+ (Z_{k_i})^2``, or None if unpaired."""
    half = {}
    for p, exps in prim.items():
        if any(c % 2 for c in exps.values()):
            return None
        half[p] = {a: c // 2 for a, c in exps.items()}
    return invariant_factors(half)


def _remove(prim, p: int, a: int, count: int):
    out = {q: dict(e) for q, e in prim.items()}
    have = out.get(p, {}).get(a, 0)
    if have < count:
        return None
    if have == count:
        del out[p][a]
        if not out[p]:
            del out[p]
    else:
        out[p][a] = have - count
    return out


def barden_candidates(h: H2Data) -> list[BardenName]:
    """Every name ``M_{j;...;r}`` whose homology and Barden invariant match ``h``."""
    prim = primary_decomposition(h)
    i = h.barden_i
    names = []
    if i == 0:
        chain = _paired_chain(prim)
        if chain is not None:
            names.append(BardenName(0, chain, h.rank))
    elif i is INF:
        chain = _paired_chain(prim)
        if chain is not None and h.rank >= 1:
            names.append(BardenName(INF, chain, h.rank - 1))
    elif isinstance(i, int) and i >= 1:
        rest = _remove(prim, 2, i, 2)
        if rest is not None and (chain := _paired_chain(rest)) is not None:
            names.append(BardenName(i, chain, h.rank))
        if i == 1:
            rest = _remove(prim, 2, 1, 1)
            if rest is not None and (chain := _paired_chain(rest)) is not None:
                names.append(BardenName(-1, chain, h.rank))
    return names


def barden_normal_form(h: H2Data) -> BardenName:
    """The Barden name of ``h``; raises :class:`NotRealizable` if there is none."""
    if h.barden_i is None:
        raise NotRealizable("Barden invariant unspecified")
    names = barden_candidates(h)
    if len(names) == 1:
        return names[0]
    if names:
        raise NotRealizable(f"ambiguous name, candidates: {', '.join(map(str, names))}")
    i = h.barden_i
    prim = primary_decomposition(h)
    if i is INF and h.rank == 0:
        raise NotRealizable("i(M) = inf requires a free summand (X_inf), but rank is 0")
    if i in (0, INF):
        odd = [(p ** a, c) for p, e in prim.items() for a, c in e.items() if c % 2]
        raise NotRealizable(
            "torsion does not split into pairs Z_k + Z_k; odd multiplicities at "
            + ", ".join(f"Z_{q}^{c}" for q, c in odd)
        )
    raise NotRealizable(
        f"i(M) = {i}: no X_{i} summand Z_{2 ** i}^2"
        + (" or X_-1 summand Z_2" if i == 1 else "")
        + " leaves a torsion group that splits into pairs"
    )


# -- triangular numbers and the rational homology sphere conditions ---------


def is_triangular(n: int) -> int | None:
    """The degree ``d >= 3`` with ``n = (d-1)(d-2)/2``, or None."""
    if n < 1:
        return None
    s = isqrt(8 * n + 1)
    if s * s != 8 * n + 1:
        return None
    return (3 + s) // 2


@dataclass(frozen=True)
class PrimePart:
    p: int
    exponent: int
    count: int

    @property
    def order(self) -> int:
        return self.p ** self.exponent


def prime_parts(h: H2Data) -> list[PrimePart]:
    return [PrimePart(p, a, c) for p, exps in primary_decomposition(h).items() for a, c in exps.items()]


def _require_sphere(h: H2Data, what: str) -> None:
    if h.rank != 0:
        raise ValueError(f"{what} applies to rational homology spheres (rank 0), got rank {h.rank}")


def kollar_obstruction(h: H2Data) -> CheckResult:
    """At most ten of the numbers ``c(p^j)/2`` may lie outside the triangular numbers.

    Odd ``c(p^j)`` count as outside.
    """
    _require_sphere(h, "the Kollar obstruction")
    bad = tuple(
        (part.p, part.exponent, part.count)
        for part in prime_parts(h)
        if part.count % 2 or is_triangular(part.count // 2) is None
    )
    if len(bad) > 10:
        return CheckResult(
            False, "Kollar-10", f"{len(bad)} parts with c(p^j)/2 not triangular (limit 10)", bad
        )
    return CheckResult(True, detail=f"{len(bad)} non-triangular part(s), limit 10", witness=bad)


def tstar_check(h: H2Data) -> CheckResult:
    """Each ``c(p^j)/2`` is triangular of degree ``d`` with ``p`` not dividing ``d``."""
    _require_sphere(h, "the T*_p condition")
    for part in prime_parts(h):
        g, rem = divmod(part.count, 2)
        d = None if rem else is_triangular(g)
        if d is None:
            return CheckResult(
                False, "T",
                f"c({part.p}^{part.exponent}) = {part.count} is not twice a triangular number",
                (part.p, part.exponent, part.count, None),
            )
        if gcd(d, part.p) != 1:
            return CheckResult(
                False, f"T*_{part.p}",
                f"c({part.p}^{part.exponent}) = {part.count}: degree {d} is divisible by {part.p}",
                (part.p, part.exponent, part.count, d),
            )
    return CheckResult(True, detail="every part lies in T*_p")


def coprime_parts(h: H2Data) -> list[tuple[int, int]] | None:
    """Write the torsion as ``+ Z_{m_i}^{2 g_i}`` with pairwise coprime ``m_i``.

    Uses the prime-power parts ``m_i = p^a``; returns ``[(m_i, g_i)]`` or None
    when some prime carries two exponents or an odd multiplicity.
    """
    parts = []
    for p, exps in primary_decomposition(h).items():
        if len(exps) != 1:
            return None
        (a, c), = exps.items()
        if c % 2:
            return None
        parts.append((p ** a, c // 2))
    return parts
