"""Semi-regular Seifert bundles over the base surfaces and their total spaces.

A :class:`SeifertCertificate` records the base surface, the isotropy curves
with their multiplicities and orbit invariants, and the background line
bundle ``B``. The functions here recompute, from that data alone, everything
needed to certify a simply connected 5-manifold: ``H_1 = 0``, ``H_2``, ``w_2``,
the Barden invariant, and positivity of the orbifold Kahler class.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd, lcm

from .abelian import INF, CheckResult, H2Data, factor, normalize
from .lattice import (
    DivisorClass,
    NonIntegralGenus,
    RationalClass,
    SurfaceKind,
    SurfaceLattice,
    adjunction_genus,
    divisibility,
    f2_span_membership,
    fp_rank,
    intersect,
    is_ample,
)

SMOOTH_TRANSVERSE = "smooth-transverse-divisors"
ABELIAN_PI1 = "abelian-complement-pi1"
DEFAULT_ASSUMPTIONS = (SMOOTH_TRANSVERSE, ABELIAN_PI1)


@dataclass(frozen=True)
class OrbitDivisor:
    """Isotropy curve ``cls`` with multiplicity ``m`` and orbit invariant ``b``."""

    cls: DivisorClass
    m: int
    b: int
    genus: int

    @classmethod
    def make(cls, divisor: DivisorClass, m: int, b: int) -> OrbitDivisor:
        return cls(divisor, m, b, adjunction_genus(divisor))

    @property
    def j(self) -> int:
        """The companion invariant with ``j * b = 1 (mod m)``."""
        return pow(self.b, -1, self.m)


@dataclass(frozen=True)
class SeifertCertificate:
    surface: SurfaceLattice
    divisors: tuple[OrbitDivisor, ...]
    bclass: DivisorClass
    assumptions: tuple[str, ...] = DEFAULT_ASSUMPTIONS

    @property
    def multiplicities(self) -> tuple[int, ...]:
        return tuple(d.m for d in self.divisors)

    @property
    def lcm(self) -> int:
        return lcm(*self.multiplicities) if self.divisors else 1

    @property
    def all_odd(self) -> bool:
        return all(d.m % 2 for d in self.divisors)


@dataclass(frozen=True)
class Violation:
    clause: str
    detail: str

    def __str__(self) -> str:
        return f"[{self.clause}] {self.detail}"


class CertificateError(ValueError):
    """A certificate failed verification."""

    def __init__(self, message: str, violations: tuple[Violation, ...] = ()):
        super().__init__(message)
        self.violations = violations


class InvalidCertificate(CertificateError):
    pass


class H1Nonzero(CertificateError):
    pass


def _reference_ample(surface: SurfaceLattice) -> DivisorClass:
    if surface.kind is SurfaceKind.CP2:
        return surface.cls(1)
    if surface.kind is SurfaceKind.CP1xCP1:
        return surface.cls(1, 1)
    k = surface.blowups
    return surface.cls(k + 1, *([-1] * k))


def pi1_abelian_basis(cert: SeifertCertificate) -> tuple[bool, str]:
    """Whether the complement of the isotropy curves has abelian ``pi_1``.

    Curves of positive self-intersection meeting transversally qualify
    (Nori). A smooth rational ``(-1)``-curve disjoint from all other
    isotropy curves is also allowed: blowing it down turns its complement
    into the complement of a point, which does not change ``pi_1``.
    """
    divs = cert.divisors
    for idx, d in enumerate(divs):
        sq = intersect(d.cls, d.cls)
        if sq > 0:
            continue
        exceptional = sq == -1 and d.genus == 0 and all(
            intersect(d.cls, o.cls) == 0 for jdx, o in enumerate(divs) if jdx != idx
        )
        if not exceptional:
            return False, f"divisor {idx + 1} has D.D = {sq} and is not a disjoint exceptional curve"
    return True, "positive self-intersections; exceptional curves disjoint"


def validate(cert: SeifertCertificate) -> list[Violation]:
    """All violations of the certificate's structural conditions (empty if valid)."""
    out: list[Violation] = []
    surface = cert.surface
    if cert.bclass.lattice is not surface and cert.bclass.lattice != surface:
        out.append(Violation("lattice", f"background class lives on {cert.bclass.lattice.name}, not {surface.name}"))
    ample = _reference_ample(surface)
    usable = []
    for n, d in enumerate(cert.divisors, 1):
        if d.cls.lattice is not surface and d.cls.lattice != surface:
            out.append(Violation("lattice", f"divisor {n} lives on {d.cls.lattice.name}, not {surface.name}"))
            continue
        usable.append((n, d))
        if d.m < 2:
            out.append(Violation("multiplicity", f"divisor {n}: m = {d.m} < 2"))
            continue
        if not 0 < d.b < d.m:
            out.append(Violation("range", f"divisor {n}: b = {d.b} not in (0, {d.m})"))
        if gcd(d.b, d.m) != 1:
            out.append(Violation("coprime-b", f"divisor {n}: gcd(b, m) = gcd({d.b}, {d.m}) != 1"))
        try:
            g = adjunction_genus(d.cls)
        except NonIntegralGenus as exc:
            out.append(Violation("genus", f"divisor {n}: {exc}"))
        else:
            if g != d.genus:
                out.append(Violation("genus", f"divisor {n}: recorded genus {d.genus}, adjunction gives {g}"))
            if g < 0:
                out.append(Violation("genus", f"divisor {n}: negative genus {g}"))
        if intersect(d.cls, ample) <= 0:
            out.append(Violation("positivity", f"divisor {n}: class {d.cls} is not effective"))
    for a, (n1, d1) in enumerate(usable):
        for n2, d2 in usable[a + 1:]:
            x = intersect(d1.cls, d2.cls)
            if x < 0:
                out.append(Violation("intersection", f"divisors {n1},{n2}: D_i.D_j = {x} < 0"))
            elif x and gcd(d1.m, d2.m) != 1:
                out.append(Violation(
                    "orbifold",
                    f"divisors {n1},{n2} meet (D_i.D_j = {x}) but gcd(m_i, m_j) = gcd({d1.m}, {d2.m}) != 1",
                ))
    if not out and ABELIAN_PI1 in cert.assumptions:
        ok, why = pi1_abelian_basis(cert)
        if not ok:
            out.append(Violation("pi1-basis", why))
    return out


def _require_valid(cert: SeifertCertificate) -> None:
    violations = validate(cert)
    if violations:
        raise InvalidCertificate(
            "invalid certificate: " + "; ".join(map(str, violations)), tuple(violations)
        )


def c1_over_m(cert: SeifertCertificate) -> DivisorClass:
    """``m c_1(B) + sum b_i (m/m_i) [D_i]`` with ``m = lcm(m_i)``."""
    m = cert.lcm
    out = [m * c for c in cert.bclass.coeffs]
    for d in cert.divisors:
        w = d.b * (m // d.m)
        out = [x + w * c for x, c in zip(out, d.cls.coeffs)]
    return cert.surface.cls(*out)


def c1_orbifold(cert: SeifertCertificate) -> RationalClass:
    """``c_1(M/X) = c_1(B) + sum (b_i/m_i) [D_i]`` in lowest terms."""
    coeffs = [Fraction(c) for c in cert.bclass.coeffs]
    for d in cert.divisors:
        w = Fraction(d.b, d.m)
        coeffs = [x + w * c for x, c in zip(coeffs, d.cls.coeffs)]
    den = lcm(*(x.denominator for x in coeffs))
    num = cert.surface.cls(*(int(x * den) for x in coeffs))
    return RationalClass.make(num, den)


@dataclass(frozen=True)
class H1Report:
    """The three conditions for ``H_1(M) = 0``."""

    clauses: tuple[CheckResult, ...]

    @property
    def vanishes(self) -> bool:
        return all(self.clauses)

    def failed(self) -> list[CheckResult]:
        return [c for c in self.clauses if not c]

    def __bool__(self) -> bool:
        return self.vanishes


def h1_vanishes(cert: SeifertCertificate) -> H1Report:
    """Check ``H_1(M, Z) = 0``.

    (1) the base is simply connected (true for every supported surface);
    (2) ``H^2(X) -> + H^2(D_i, Z_{m_i})`` is onto, tested prime by prime:
        for each ``p``, the classes ``[D_i]`` with ``p | m_i`` must be
        independent mod ``p``;
    (3) ``c_1(M/m)`` is primitive.
    """
    return _h1_report(cert, c1_over_m(cert))


def _h1_report(cert: SeifertCertificate, cm: DivisorClass) -> H1Report:
    c1 = CheckResult(True, "H1-1", "base surface is simply connected")
    by_prime: dict[int, list[int]] = {}
    for idx, d in enumerate(cert.divisors):
        for p, _ in factor(d.m):
            by_prime.setdefault(p, []).append(idx)
    c2 = CheckResult(True, "H1-2", "restriction to the isotropy curves is onto")
    for p, idxs in sorted(by_prime.items()):
        rank = fp_rank([cert.divisors[i].cls for i in idxs], p)
        if rank < len(idxs):
            names = ", ".join(f"D_{i + 1}" for i in idxs)
            c2 = CheckResult(
                False, "H1-2",
                f"classes {names} (multiplicities divisible by {p}) are dependent mod {p}: rank {rank} < {len(idxs)}",
                (p, tuple(i + 1 for i in idxs)),
            )
            break
    div = divisibility(cm)
    if div == 1:
        c3 = CheckResult(True, "H1-3", "c1(M/m) is primitive")
    else:
        c3 = CheckResult(False, "H1-3", f"c1(M/m) = {cm} has divisibility {div}", (div,))
    return H1Report((c1, c2, c3))


def _require_h1(cert: SeifertCertificate, cm: DivisorClass | None = None) -> H1Report:
    report = _h1_report(cert, c1_over_m(cert) if cm is None else cm)
    if not report.vanishes:
        bad = report.failed()
        raise H1Nonzero(
            "H_1(M) != 0: " + "; ".join(f"[{c.clause}] {c.detail}" for c in bad),
            tuple(Violation(c.clause, c.detail) for c in bad),
        )
    return report


def h2_of_total_space(cert: SeifertCertificate) -> H2Data:
    """``H_2(M) = Z^{b_2(X)-1} + sum Z_{m_i}^{2 g_i}``; Barden invariant left unset."""
    _require_h1(cert)
    return _h2_formula(cert, None)


def _h2_formula(cert: SeifertCertificate, barden_i) -> H2Data:
    torsion = [(d.m, 2 * d.genus) for d in cert.divisors if d.genus > 0]
    return normalize(torsion, cert.surface.b2 - 1, barden_i)


def _twisted(base: DivisorClass, cert: SeifertCertificate) -> DivisorClass:
    """``base + sum b_i [D_i]``."""
    out = list(base.coeffs)
    for d in cert.divisors:
        out = [x + d.b * c for x, c in zip(out, d.cls.coeffs)]
    return cert.surface.cls(*out)


def pi_star_kernel(cert: SeifertCertificate) -> list[DivisorClass]:
    """Generators of ``ker(pi^*: H^2(X, Z_2) -> H^2(M, Z_2))`` (assumes ``H_1(M) = 0``).

    All multiplicities odd: the single class ``c_1(B) + sum b_i [D_i]``.
    Otherwise the classes ``[D_i]`` with ``m_i`` even.
    """
    if cert.all_odd:
        return [_twisted(cert.bclass, cert)]
    return [d.cls for d in cert.divisors if d.m % 2 == 0]


def w2_of_total_space(cert: SeifertCertificate) -> bool:
    """True iff ``w_2(M) = 0``, using ``w_2(M) = pi^*(w_2(X) + sum b_i [D_i] + c_1(B))``."""
    return f2_span_membership(_twisted(cert.surface.canonical + cert.bclass, cert), pi_star_kernel(cert))


def w2_isotropy_formula(cert: SeifertCertificate) -> bool:
    """True iff ``w_2(M) = 0`` via ``w_2(M) = pi^* w_2(X) + sum (m_i - 1)[E_i]``.

    Only for odd multiplicities, where every ``(m_i - 1)[E_i]`` vanishes mod 2.
    """
    if not cert.all_odd:
        raise ValueError("the isotropy-divisor formula is only evaluated for odd multiplicities")
    return f2_span_membership(cert.surface.canonical, pi_star_kernel(cert))


def mod2_betti_from_isotropy(cert: SeifertCertificate) -> int:
    """``dim H^2(M, Z_2) = k + sum_{m_i even} 2 g_i``."""
    return cert.surface.b2 - 1 + sum(2 * d.genus for d in cert.divisors if d.m % 2 == 0)


def kahler_positive(cert: SeifertCertificate) -> bool:
    """Whether ``c_1(M/X)`` is an orbifold Kahler class.

    Tested on ``c_1(M/m) = m c_1(M/X)``, a positive multiple.
    """
    return is_ample(c1_over_m(cert))


@dataclass(frozen=True)
class FiveManifoldInvariants:
    h2: H2Data
    spin: bool
    h1_zero: bool
    pi1_abelian_assumed: bool
    kahler: bool

    @property
    def simply_connected(self) -> bool:
        return self.h1_zero and self.pi1_abelian_assumed


def invariants_of(cert: SeifertCertificate) -> FiveManifoldInvariants:
    """Verify ``cert`` and compute the invariants of its total space.

    Raises :class:`InvalidCertificate` on structural violations and
    :class:`H1Nonzero` when ``H_1(M) != 0``.
    """
    _require_valid(cert)
    cm = c1_over_m(cert)
    _require_h1(cert, cm)
    spin = w2_of_total_space(cert)
    # validate already rejected a failing basis when the assumption is recorded
    pi1_ok = ABELIAN_PI1 in cert.assumptions or pi1_abelian_basis(cert)[0]
    return FiveManifoldInvariants(
        h2=_h2_formula(cert, 0 if spin else INF),
        spin=spin,
        h1_zero=True,
        pi1_abelian_assumed=pi1_ok,
        kahler=is_ample(cm),
    )
