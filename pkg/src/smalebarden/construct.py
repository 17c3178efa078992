"""Certificate-producing constructions of semi-regular Sasakian structures.

Each constructor builds a :class:`~smalebarden.seifert.SeifertCertificate`
and runs it through the verifier before returning it:

* rank one over ``CP1 x CP1`` (:func:`construct_sums1`) and over the one-point
  blow-up of ``CP2`` (:func:`construct_sums2`), dispatched by
  :func:`construct_rank_one`;
* raising ``b_2`` by one while keeping the torsion (:func:`blowup_raise_rank`);
* rational homology spheres over ``CP2`` (:func:`construct_sphere`);
* torsion-free regular structures, circle bundles over ``CP2 # k(-CP2)``
  (:func:`construct_regular`).
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from math import gcd, lcm, prod
from typing import Sequence
from weakref import ref

from .abelian import INF, BardenName, H2Data, is_triangular, normalize
from .lattice import RationalClass, SurfaceLattice, ample_threshold, blowup_embedding, is_ample, is_primitive
from .seifert import (
    ABELIAN_PI1,
    SMOOTH_TRANSVERSE,
    CertificateError,
    FiveManifoldInvariants,
    OrbitDivisor,
    SeifertCertificate,
    c1_orbifold,
    c1_over_m,
    invariants_of,
    w2_of_total_space,
)


class PreconditionViolated(ValueError):
    pass


class ConstructionFailed(RuntimeError):
    """A constructed certificate failed its own verification (an internal defect)."""


class SpinTargetUnreachable(ValueError):
    pass


class Unsolvable(ValueError):
    def __init__(self, message: str, witness: tuple = ()):
        super().__init__(message)
        self.witness = witness


# -- linear Diophantine equations -------------------------------------------


def bezout(values: Sequence[int]) -> tuple[int, list[int]]:
    """``(g, x)`` with ``g = gcd(values) = sum x_i * values_i``, by iterated extended gcd."""
    g, xs = 0, []
    for v in values:
        # extended Euclid on (g, v)
        r0, r1, s0, s1, t0, t1 = g, v, 1, 0, 0, 1
        while r1:
            q = r0 // r1
            r0, r1 = r1, r0 - q * r1
            s0, s1 = s1, s0 - q * s1
            t0, t1 = t1, t0 - q * t1
        if r0 < 0:
            r0, s0, t0 = -r0, -s0, -t0
        xs = [s0 * x for x in xs] + [t0]
        g = r0
    return g, xs


@dataclass(frozen=True)
class DiophantineSolution:
    """``beta`` and ``b`` with ``m * beta + sum c_i b_i = target``."""

    beta: int
    b: tuple[int, ...]


def _units(m: int) -> list[int]:
    return [x for x in range(1, m) if gcd(x, m) == 1]


def solve_linear_combination(
    coeffs: Sequence[int],
    bounds: Sequence[int],
    m: int,
    target: int,
    beta_parity: int | None = None,
) -> DiophantineSolution:
    """Solve ``m * beta + sum coeffs_i * b_i = target``.

    Each ``b_i`` must satisfy ``0 < b_i < bounds_i`` and ``gcd(b_i, bounds_i) = 1``;
    ``beta`` is free (``m = 0`` drops the term), optionally with a fixed parity.
    The first solution in lexicographic order of ``b`` is returned. All but the
    last ``b_i`` are enumerated over their unit residues and the last is
    solved from a linear congruence.
    """
    if not coeffs:
        raise ValueError("coeffs must be non-empty")
    if len(coeffs) != len(bounds):
        raise ValueError("coeffs and bounds differ in length")
    if target == 0:
        raise ValueError("target must be non-zero")
    g, bez = bezout([m, *coeffs])
    if target % g:
        raise Unsolvable(f"gcd({m}, {', '.join(map(str, coeffs))}) = {g} does not divide {target}", (g, tuple(bez)))
    fast = _solve_separable(coeffs, bounds, m, target, beta_parity)
    if fast is not None:
        if fast is _NO_SOLUTION:
            raise Unsolvable(_no_solution_text(beta_parity), (g, tuple(bez)))
        return fast
    residues = [_units(n) for n in bounds]
    *head, last = coeffs
    last_bound = bounds[-1]
    for prefix in product(*residues[:-1]):
        rest = target - sum(c * b for c, b in zip(head, prefix))
        if m == 0:
            if last and rest % last == 0 and (x := rest // last) in residues[-1]:
                return DiophantineSolution(0, (*prefix, x))
            continue
        # last * x + m * beta = rest
        h = gcd(last, m)
        if rest % h:
            continue
        step = abs(m) // h
        x0 = (rest // h) * pow(last // h, -1, step) % step if step > 1 else 0
        for x in range(x0 or step, last_bound, step):
            if gcd(x, last_bound) != 1:
                continue
            beta = (rest - last * x) // m
            if beta_parity is None or beta % 2 == beta_parity:
                return DiophantineSolution(beta, (*prefix, x))
    raise Unsolvable(_no_solution_text(beta_parity), (g, tuple(bez)))


def _no_solution_text(beta_parity: int | None) -> str:
    what = "" if beta_parity is None else f" with beta = {beta_parity} (mod 2)"
    return f"no solution with 0 < b_i < m_i, gcd(b_i, m_i) = 1{what}"


_NO_SOLUTION = object()


def _solve_separable(coeffs, bounds, m, target, beta_parity):
    """Shortcut when the relation splits into one congruence per ``b_i``.

    Applies when ``|m| = prod(bounds)`` with pairwise coprime bounds and every
    ``coeffs_j`` divisible by every other bound: reducing mod ``bounds_i``
    leaves ``coeffs_i * b_i = target``. The candidates for different ``i``
    differ by multiples of ``m`` in the sum, so only the parity of ``beta``
    couples them. Returns the same (lexicographically first) solution as the
    enumeration, ``_NO_SOLUTION``, or None when the shortcut does not apply.
    """
    n = len(bounds)
    if m == 0 or abs(m) != prod(bounds) or n < 2:
        return None
    for i, bi in enumerate(bounds):
        if any(coeffs[j] % bi for j in range(n) if j != i):
            return None
    if any(gcd(bounds[i], bounds[j]) != 1 for i in range(n) for j in range(i + 1, n)):
        return None
    cands = []
    for c, bi in zip(coeffs, bounds):
        row = [x for x in _units(bi) if (c * x - target) % bi == 0]
        if not row:
            return _NO_SOLUTION
        cands.append(row)
    pick = [row[0] for row in cands]
    if beta_parity is not None:
        # bit of each candidate: parity of its shift of beta against the first one
        bits = [[((c * x - c * row[0]) // m) % 2 for x in row] for c, row in zip(coeffs, cands)]
        base = (target - sum(c * x for c, x in zip(coeffs, pick))) // m % 2
        need = (base - beta_parity) % 2
        # reach[i]: XOR values achievable by components i..n-1
        reach = [set() for _ in range(n + 1)]
        reach[n] = {0}
        for i in range(n - 1, -1, -1):
            reach[i] = {b ^ r for b in set(bits[i]) for r in reach[i + 1]}
        if need not in reach[0]:
            return _NO_SOLUTION
        for i in range(n):
            for x, bit in zip(cands[i], bits[i]):
                if need ^ bit in reach[i + 1]:
                    pick[i] = x
                    need ^= bit
                    break
    beta = (target - sum(c * x for c, x in zip(coeffs, pick))) // m
    return DiophantineSolution(beta, tuple(pick))


# -- requests ---------------------------------------------------------------


def _check_pairs(pairs: Sequence[tuple[int, int]], min_genus: int) -> None:
    for m, g in pairs:
        if m < 2:
            raise PreconditionViolated(f"multiplicity {m} < 2")
        if g < min_genus:
            raise PreconditionViolated(f"genus {g} < {min_genus}")
    ms = [m for m, _ in pairs]
    for a in range(len(ms)):
        for b in range(a + 1, len(ms)):
            if gcd(ms[a], ms[b]) != 1:
                raise PreconditionViolated(f"multiplicities {ms[a]} and {ms[b]} are not coprime")


@dataclass(frozen=True)
class RankOneRequest:
    """Target ``H_2 = Z + sum Z_{m_i}^{2 g_i}``, spin or not."""

    pairs: tuple[tuple[int, int], ...]
    spin_target: bool

    def __post_init__(self) -> None:
        object.__setattr__(self, "pairs", tuple((int(m), int(g)) for m, g in self.pairs))
        _check_pairs(self.pairs, 1)

    def h2(self) -> H2Data:
        return normalize([(m, 2 * g) for m, g in self.pairs], 1, 0 if self.spin_target else INF)


@dataclass(frozen=True)
class SphereRequest:
    """Target ``H_2 = sum Z_{m_i}^{2 g_i}`` with ``g_i = (d_i-1)(d_i-2)/2``, spin."""

    parts: tuple[tuple[int, int], ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "parts", tuple((int(m), int(g)) for m, g in self.parts))
        _check_pairs(self.parts, 1)
        for m, g in self.parts:
            d = is_triangular(g)
            if d is None:
                raise PreconditionViolated(f"genus {g} is not triangular")
            if gcd(m, d) != 1:
                raise PreconditionViolated(f"gcd(m, d) = gcd({m}, {d}) = {gcd(m, d)} != 1")

    @property
    def degrees(self) -> tuple[int, ...]:
        return tuple(is_triangular(g) for _, g in self.parts)

    def h2(self) -> H2Data:
        return normalize([(m, 2 * g) for m, g in self.parts], 0, 0)


# -- verification wrapper ---------------------------------------------------


# certificates that passed _certify, so blowup_raise_rank can skip re-checking its input;
# keyed by identity (hashing a certificate is comparatively slow)
_VERIFIED: dict[int, tuple[ref, FiveManifoldInvariants]] = {}
_VERIFIED_LIMIT = 4096


def _remember(cert: SeifertCertificate, inv: FiveManifoldInvariants) -> None:
    if len(_VERIFIED) >= _VERIFIED_LIMIT:
        _VERIFIED.clear()
    _VERIFIED[id(cert)] = (ref(cert), inv)


def _recall(cert: SeifertCertificate) -> FiveManifoldInvariants | None:
    hit = _VERIFIED.get(id(cert))
    if hit is not None and hit[0]() is cert:
        return hit[1]
    return None


def _certify(
    cert: SeifertCertificate, expected: H2Data, what: str, inv: FiveManifoldInvariants | None = None
) -> SeifertCertificate:
    if inv is None:
        try:
            inv = invariants_of(cert)
        except CertificateError as exc:
            raise ConstructionFailed(f"{what}: {exc}") from exc
    if inv.h2 != expected:
        raise ConstructionFailed(f"{what}: verifier found {inv.h2}, expected {expected}")
    if not inv.kahler:
        raise ConstructionFailed(f"{what}: c1(M/X) = {c1_orbifold(cert)} is not ample")
    if not inv.pi1_abelian_assumed:
        raise ConstructionFailed(f"{what}: abelian pi_1 basis fails")
    _remember(cert, inv)
    return cert


def _smallest_beta(m: int, offset: int, a1: int) -> int:
    """Smallest ``beta`` with ``m * beta + offset > 0`` and coprime to ``a1``."""
    beta = -(offset // m)  # m * beta + offset >= 0 ... adjust below
    while m * beta + offset <= 0 or gcd(a1, m * beta + offset) != 1:
        beta += 1
    return beta


def _solve_even(coeffs, bounds, m, parity):
    """Even-multiplicity relation: target 2, else 4 if the parity forces it."""
    last = None
    for target in (2, 4):
        try:
            return target, solve_linear_combination(coeffs, bounds, m, target, parity)
        except Unsolvable as exc:
            last = exc
    raise last


def _split(pairs):
    ms = [m for m, _ in pairs]
    m = lcm(*ms)
    return ms, m, [m // mi for mi in ms]


def construct_sums1(req: RankOneRequest) -> SeifertCertificate:
    """Rank one over ``CP1 x CP1`` with isotropy curves ``2 H1 + (g_i + 1) H2``.

    Needs ``g_i`` even whenever ``m_i`` is even. With all ``m_i`` odd only the
    spin manifold is produced; with one even ``m_i`` both are, the parity of
    ``beta_1`` selecting ``w_2``.
    """
    for mi, g in req.pairs:
        if mi % 2 == 0 and g % 2:
            raise PreconditionViolated(f"(m, g) = ({mi}, {g}) is (even, odd)")
    lat = SurfaceLattice.cp1xcp1()
    ms, m, big = _split(req.pairs)
    coeffs = [2 * M for M in big]
    if m % 2:
        if not req.spin_target:
            raise PreconditionViolated("odd multiplicities give only spin manifolds over CP1xCP1")
        sol = solve_linear_combination(coeffs, ms, m, 1)
        a1 = 1
    else:
        a1, sol = _solve_even(coeffs, ms, m, 0 if req.spin_target else 1)
    offset = sum((g + 1) * M * b for (_, g), M, b in zip(req.pairs, big, sol.b))
    beta2 = _smallest_beta(m, offset, a1)
    divisors = tuple(
        OrbitDivisor.make(lat.cls(2, g + 1), mi, b) for (mi, g), b in zip(req.pairs, sol.b)
    )
    cert = SeifertCertificate(lat, divisors, lat.cls(sol.beta, beta2))
    return _certify(cert, req.h2(), "sums1")


def construct_sums2(req: RankOneRequest) -> SeifertCertificate:
    """Rank one over ``CP2 # (-CP2)`` with isotropy curves ``d_i H - (d_i - 2) E``, ``d_i = g_i + 2``.

    Needs ``g_i`` odd whenever ``m_i`` is even. With all ``m_i`` odd only the
    non-spin manifold is produced; with one even ``m_i`` both are, the parity
    of ``beta_1 - beta_2`` selecting ``w_2``.
    """
    for mi, g in req.pairs:
        if mi % 2 == 0 and g % 2 == 0:
            raise PreconditionViolated(f"(m, g) = ({mi}, {g}) is (even, even)")
    lat = SurfaceLattice.blowup(1)
    ms, m, big = _split(req.pairs)
    coeffs = [2 * M for M in big]
    if m % 2:
        if req.spin_target:
            raise PreconditionViolated("odd multiplicities give only non-spin manifolds over CP2#-CP2")
        target, sol = 1, solve_linear_combination(coeffs, ms, m, 1)
    else:
        target, sol = _solve_even(coeffs, ms, m, 0 if req.spin_target else 1)
    delta = sol.beta  # beta_1 - beta_2
    offset = sum(M * b * g for (_, g), M, b in zip(req.pairs, big, sol.b))  # d_i - 2 = g_i
    beta2 = _smallest_beta(m, offset, target)
    divisors = tuple(
        OrbitDivisor.make(lat.cls(g + 2, -g), mi, b) for (mi, g), b in zip(req.pairs, sol.b)
    )
    cert = SeifertCertificate(lat, divisors, lat.cls(delta + beta2, -beta2))
    return _certify(cert, req.h2(), "sums2")


def construct_rank_one(req: RankOneRequest) -> SeifertCertificate:
    """Any ``Z + sum Z_{m_i}^{2 g_i}`` with pairwise coprime ``m_i`` and ``g_i >= 1``, spin or not."""
    even = [(mi, g) for mi, g in req.pairs if mi % 2 == 0]
    if not even:
        return construct_sums1(req) if req.spin_target else construct_sums2(req)
    (_, g1), = even
    return construct_sums1(req) if g1 % 2 == 0 else construct_sums2(req)


def blowup_raise_rank(cert: SeifertCertificate, spin_target: bool) -> SeifertCertificate:
    """Blow up a point off the isotropy locus: ``b_2`` grows by one, torsion is kept.

    New orbit invariants ``N b_i`` and Kahler class ``N c_1(M/X) - a E`` for the
    smallest ``N >= 2`` coprime to ``m`` whose outcome is the spin target.
    With odd multiplicities only the parity of ``N`` matters; which parity
    gives spin depends on whether ``w_2(X)`` vanishes, so both are evaluated.
    With an even multiplicity ``N`` is odd, the exceptional curve may be
    added as an isotropy curve with ``(m, b) = (2, 1)``, and ``a = 2`` flips
    ``w_2`` relative to ``a = 1``. Every option is screened by the ``w_2``
    computation before the full verification.
    """
    inv = _recall(cert)
    if inv is None:
        try:
            inv = invariants_of(cert)
        except CertificateError as exc:
            raise PreconditionViolated(f"input certificate does not verify: {exc}") from exc
    m = cert.lcm
    lat, embed, e = blowup_embedding(cert.surface)
    omega = RationalClass.make(c1_over_m(cert), m)
    num, den = embed(omega.numerator), omega.denominator
    # (parity of N, E as isotropy curve, coefficient a of E)
    if cert.all_odd:
        options = [(0, False, 1), (1, False, 1)]
    elif spin_target:
        options = [(1, True, 1), (1, False, 1), (1, False, 2), (1, True, 2)]
    else:
        options = [(1, False, 1), (1, True, 1), (1, False, 2), (1, True, 2)]

    def smallest_n(parity: int, add_exceptional: bool, a: int) -> int:
        # N*omega - a*E, plus E/2 when E carries isotropy
        if add_exceptional:
            hi = ample_threshold(num, (2 * a - 1) * den * e)
            floor = None if hi is None else -(-hi // 2)
        else:
            floor = ample_threshold(num, a * den * e)
        if floor is None:
            raise PreconditionViolated(f"c1(M/X) = {omega} is not ample on the blow-up")
        n = max(2, floor)
        n += (n - parity) % 2
        while gcd(n, m) != 1:
            n += 2
        return n

    candidates = ((smallest_n(*opt), opt[1], opt[2]) for opt in options)
    if cert.all_odd:
        candidates = iter(sorted(candidates))
    tried = []
    for n, add_exceptional, a in candidates:
        tried.append((n, add_exceptional, a))
        divisors = []
        bclass = n * embed(cert.bclass) - e * a
        for d in cert.divisors:
            q, b = divmod(n * d.b, d.m)
            cls = embed(d.cls)
            divisors.append(OrbitDivisor(cls, d.m, b, d.genus))
            bclass = bclass + q * cls
        if add_exceptional:
            divisors.append(OrbitDivisor.make(e, 2, 1))
        raised = SeifertCertificate(lat, tuple(divisors), bclass, cert.assumptions)
        if w2_of_total_space(raised) != spin_target:
            continue
        try:
            got = invariants_of(raised)
        except CertificateError as exc:
            raise ConstructionFailed(f"blow-up with N = {n}: {exc}") from exc
        if got.spin == spin_target:
            expected = H2Data(inv.h2.rank + 1, inv.h2.torsion, 0 if spin_target else INF)
            return _certify(raised, expected, "blow-up", got)
    kind = "spin" if spin_target else "non-spin"
    raise SpinTargetUnreachable(
        f"no blow-up of this {'spin' if inv.spin else 'non-spin'} certificate is {kind} "
        f"(tried N, E-isotropy, a = {'; '.join(f'{n}, {x}, {a}' for n, x, a in tried)})"
    )


def construct_sphere(req: SphereRequest) -> SeifertCertificate:
    """Rational homology sphere over ``CP2`` with isotropy curves of degree ``d_i``.

    ``B = beta H`` solves ``m beta + sum b_i (m/m_i) d_i = 1``, so ``c_1(M/m) = H``.
    """
    lat = SurfaceLattice.cp2()
    if not req.parts:
        cert = SeifertCertificate(lat, (), lat.cls(1), (SMOOTH_TRANSVERSE,))
        return _certify(cert, req.h2(), "sphere")
    ms, m, big = _split(req.parts)
    ds = req.degrees
    sol = solve_linear_combination([M * d for M, d in zip(big, ds)], ms, m, 1)
    divisors = tuple(OrbitDivisor.make(lat.cls(d), mi, b) for mi, d, b in zip(ms, ds, sol.b))
    cert = SeifertCertificate(lat, divisors, lat.cls(sol.beta))
    return _certify(cert, req.h2(), "sphere")


def construct_regular(k: int, spin_target: bool) -> SeifertCertificate:
    """Circle bundle with ``H_2 = Z^k``: Euler class ``(2k+1)H - sum E_i`` (spin) or ``2kH - sum E_i``."""
    if k < 0:
        raise PreconditionViolated("k must be non-negative")
    if k == 0:
        if not spin_target:
            raise PreconditionViolated("k = 0 admits only the spin manifold S^5")
        lat = SurfaceLattice.cp2()
        e = lat.cls(1)
    else:
        lat = SurfaceLattice.blowup(k)
        e = lat.cls(2 * k + 1 if spin_target else 2 * k, *([-1] * k))
    cert = SeifertCertificate(lat, (), e, (ABELIAN_PI1,))
    return _certify(cert, H2Data(k, (), 0 if spin_target else INF), "regular")


def regular_diffeo_name(cert: SeifertCertificate) -> BardenName:
    """Diffeomorphism type of a circle bundle with primitive ample Euler class."""
    if cert.divisors:
        raise ValueError("not a regular structure: isotropy curves present")
    if not (is_primitive(cert.bclass) and is_ample(cert.bclass)):
        raise ValueError(f"Euler class {cert.bclass} is not primitive and ample")
    inv = invariants_of(cert)
    b2 = cert.surface.b2
    if inv.spin:
        return BardenName(0, (), b2 - 1)
    return BardenName(INF, (), b2 - 2)


def is_regular_spin_by_parity(cert: SeifertCertificate) -> bool:
    """Spin iff ``w_2(X) = 0`` or ``w_2(X) = e`` mod 2, from coefficient parities alone."""
    k = [c % 2 for c in cert.surface.canonical.coeffs]
    e = [c % 2 for c in cert.bclass.coeffs]
    return not any(k) or k == e


__all__ = [
    "ConstructionFailed", "DiophantineSolution", "PreconditionViolated", "RankOneRequest",
    "SphereRequest", "SpinTargetUnreachable", "Unsolvable", "bezout", "blowup_raise_rank",
    "construct_rank_one", "construct_regular", "construct_sphere", "construct_sums1",
    "construct_sums2", "is_regular_spin_by_parity", "regular_diffeo_name", "solve_linear_combination",
]
