"""Decision procedures for Sasakian structures on Smale-Barden manifolds.

Every verdict is one of three kinds. ``PROVABLY_YES`` carries a Seifert
certificate that was re-verified here. ``PROVABLY_NO`` names the obstruction
that fired. ``UNKNOWN`` says which hypothesis was missing. The trace lists
every check that ran, in order.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from math import gcd
from typing import Iterable

from .abelian import (
    INF,
    CheckResult,
    H2Data,
    NotRealizable,
    barden_normal_form,
    coprime_parts,
    format_barden,
    gk_check,
    invariant_factors,
    is_triangular,
    kollar_obstruction,
    primary_decomposition,
    t_invariants,
    tstar_check,
)
from .construct import (
    ConstructionFailed,
    RankOneRequest,
    SphereRequest,
    blowup_raise_rank,
    construct_rank_one,
    construct_regular,
    construct_sphere,
)
from .seifert import FiveManifoldInvariants, SeifertCertificate, invariants_of


class Status(enum.Enum):
    PROVABLY_YES = "ProvablyYes"
    PROVABLY_NO = "ProvablyNo"
    UNKNOWN = "Unknown"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class TraceStep:
    check: str
    outcome: str
    detail: str = ""


@dataclass
class Verdict:
    status: Status
    certificate: SeifertCertificate | None = None
    obstruction: str | None = None
    reason: str = ""
    trace: list[TraceStep] = field(default_factory=list)
    invariants: FiveManifoldInvariants | None = None
    note: str = ""

    def __post_init__(self) -> None:
        if self.status is Status.PROVABLY_YES and self.certificate is None:
            raise ValueError("ProvablyYes needs a certificate")
        if self.status is Status.PROVABLY_NO and not self.obstruction:
            raise ValueError("ProvablyNo needs an obstruction")
        if self.status is Status.UNKNOWN and not self.reason:
            raise ValueError("Unknown needs a reason")

    @property
    def yes(self) -> bool:
        return self.status is Status.PROVABLY_YES

    @property
    def no(self) -> bool:
        return self.status is Status.PROVABLY_NO


class _Trace:
    def __init__(self) -> None:
        self.steps: list[TraceStep] = []

    def add(self, check: str, result: CheckResult | bool, detail: str = "") -> None:
        ok = bool(result)
        if isinstance(result, CheckResult):
            detail = detail or result.detail
        self.steps.append(TraceStep(check, "pass" if ok else "fail", detail))

    def info(self, check: str, detail: str) -> None:
        self.steps.append(TraceStep(check, "info", detail))

    def yes(self, cert: SeifertCertificate, inv: FiveManifoldInvariants, reason: str, note: str = "") -> Verdict:
        return Verdict(Status.PROVABLY_YES, cert, None, reason, self.steps, inv, note)

    def no(self, clause: str, reason: str) -> Verdict:
        return Verdict(Status.PROVABLY_NO, None, clause, reason, self.steps)

    def unknown(self, reason: str, clause: str | None = None, note: str = "") -> Verdict:
        return Verdict(Status.UNKNOWN, None, clause, reason, self.steps, None, note)


def _reverify(cert: SeifertCertificate, h: H2Data, trace: _Trace) -> FiveManifoldInvariants:
    """Independent check that ``cert`` realizes exactly ``h``."""
    inv = invariants_of(cert)
    if inv.h2 != h or not inv.kahler or not inv.simply_connected:
        raise ConstructionFailed(f"certificate realizes {inv.h2}, query was {h}")
    trace.add("verify", True, f"{inv.h2}; H1 = 0; c1(M/X) ample")
    return inv


def _sphere_hypotheses(h: H2Data, trace: _Trace) -> tuple[str, str] | list[tuple[int, int]]:
    """Coprime parts if every semi-regular sphere hypothesis except spin holds, else (clause, detail)."""
    t, tmax = t_invariants(h)
    if tmax > 1:
        p = min(q for q, n in t.items() if n > 1)
        detail = f"t({p}) = {t[p]}: the {p}-torsion needs two different orders"
        trace.add("coprime", False, detail)
        return "coprime", detail
    trace.add("coprime", True, "one order per prime")
    parts = coprime_parts(h)
    if parts is None:
        odd = [(p, c) for p, e in primary_decomposition(h).items() for c in e.values() if c % 2]
        detail = ", ".join(f"c({p}^*) = {c} is odd" for p, c in odd)
        trace.add("pairing", False, detail)
        return "PairingFailure", detail
    trace.add("pairing", True, "all multiplicities even")
    tc = tstar_check(h)
    trace.add("triangular/T*_p", tc)
    if not tc:
        return tc.clause, tc.detail
    return parts


def decide_sasakian(h: H2Data) -> Verdict:
    """Does the Smale-Barden manifold with data ``h`` carry a Sasakian structure?"""
    trace = _Trace()
    gk = gk_check(h)
    trace.add("G-K", gk)
    if not gk:
        return trace.no(gk.clause, gk.detail)
    try:
        name = barden_normal_form(h)
    except NotRealizable as exc:
        trace.add("Barden name", False, str(exc))
        clause = "NotRealizable" if h.barden_i is INF and h.rank == 0 else "PairingFailure"
        return trace.no(clause, str(exc))
    trace.add("Barden name", True, f"{name} = {name.summands()}")
    spin = h.barden_i == 0
    if h.torsion_free:
        cert = construct_regular(h.rank, spin)
        trace.info("construct", f"regular circle bundle over {cert.surface}, e = {cert.bclass}")
        inv = _reverify(cert, h, trace)
        return trace.yes(cert, inv, "regular Sasakian structure")
    if h.rank >= 1:
        parts = coprime_parts(h)
        if parts is None:
            t, _ = t_invariants(h)
            p = min(q for q, n in t.items() if n > 1)
            trace.add("coprime", False, f"t({p}) = {t[p]}")
            return trace.unknown(
                f"torsion needs two orders of {p}-power; only pairwise coprime orders are constructed",
                "coprime",
            )
        trace.add("coprime", True, "; ".join(f"Z_{m}^{2 * g}" for m, g in parts))
        cert = construct_rank_one(RankOneRequest(tuple(parts), spin))
        trace.info("construct", f"rank one over {cert.surface}")
        for _ in range(h.rank - 1):
            cert = blowup_raise_rank(cert, spin)
        if h.rank > 1:
            trace.info("construct", f"blown up {h.rank - 1} time(s), now over {cert.surface}")
        inv = _reverify(cert, h, trace)
        return trace.yes(cert, inv, "semi-regular Sasakian structure")
    ko = kollar_obstruction(h)
    trace.add("Kollar-10", ko)
    if not ko:
        return trace.no(ko.clause, ko.detail)
    got = _sphere_hypotheses(h, trace)
    if isinstance(got, tuple):
        clause, detail = got
        return trace.unknown(f"semi-regular construction inapplicable: {detail}", clause)
    cert = construct_sphere(SphereRequest(tuple(got)))
    trace.info("construct", f"rational homology sphere over {cert.surface}")
    inv = _reverify(cert, h, trace)
    return trace.yes(cert, inv, "semi-regular Sasakian rational homology sphere")


def _require_sphere(h: H2Data) -> None:
    if h.rank:
        raise ValueError(f"rational homology spheres only (rank 0), got rank {h.rank}")


def decide_semiregular_sphere(h: H2Data) -> Verdict:
    """Semi-regular Sasakian structure on a rational homology sphere: a complete yes/no."""
    _require_sphere(h)
    trace = _Trace()
    got = _sphere_hypotheses(h, trace)
    if isinstance(got, tuple):
        clause, detail = got
        return trace.no(clause, detail)
    if h.barden_i != 0:
        detail = f"i(M) = {format_barden(h.barden_i)}; semi-regular spheres are spin"
        trace.add("spin", False, detail)
        return trace.no("spin", detail)
    trace.add("spin", True, "i(M) = 0")
    cert = construct_sphere(SphereRequest(tuple(got)))
    inv = _reverify(cert, h, trace)
    return trace.yes(cert, inv, "semi-regular Sasakian rational homology sphere")


def _factors(torsion) -> tuple[int, ...]:
    if isinstance(torsion, H2Data):
        return invariant_factors(primary_decomposition(torsion))
    return invariant_factors(primary_decomposition(list(torsion)))


def positive_table_member(torsion: H2Data | Iterable) -> bool:
    """Whether the torsion group is one of the groups allowed for positive structures.

    The list: ``Z_m^2`` (any ``m >= 1``, so the trivial group is included),
    ``Z_5^4``, ``Z_4^4``, ``Z_3^4``, ``Z_3^6``, ``Z_3^8`` and ``Z_2^{2n}``.
    """
    f = _factors(torsion)
    if not f:
        return True
    if len(set(f)) != 1:
        return False
    m, n = f[0], len(f)
    if n == 2 or (m == 2 and n % 2 == 0):
        return True
    return (m, n) in {(5, 4), (4, 4), (3, 4), (3, 6), (3, 8)}


def decide_negative_sasakian(h: H2Data) -> Verdict:
    """Negative Sasakian structure on a rational homology sphere.

    A semi-regular structure exists and the torsion is outside the positive
    table: then it is negative. Torsion in the table gives Unknown.
    """
    _require_sphere(h)
    trace = _Trace()
    if positive_table_member(h):
        trace.add("positive table", False, f"torsion {h.torsion_text() or '0'} is in the table")
        return trace.unknown(
            "torsion is one of the exceptional groups; negativity is not decided",
            "positive-table-exception",
            note="Unknown-for-negative",
        )
    trace.add("positive table", True, "torsion is outside the table")
    sub = decide_semiregular_sphere(h)
    trace.steps.extend(sub.trace)
    if not sub.yes:
        return trace.unknown(f"no semi-regular structure: {sub.reason}", sub.obstruction)
    return trace.yes(sub.certificate, sub.invariants, "negative Sasakian structure", note="negative")


def kcontact_sphere_necessary(h: H2Data) -> CheckResult:
    """Necessary condition for a semi-regular K-contact rational homology sphere.

    Passes iff the torsion is ``+ Z_{m_i}^{2 g_i}`` with pairwise coprime
    ``m_i``, triangular ``g_i`` of degree ``d_i``, and either every
    ``gcd(m_i, d_i) = 1`` (branch A) or every ``gcd(m_i, d_i + 3) = 1``
    (branch B). The witness lists the passing branches.
    """
    _require_sphere(h)
    if h.barden_i != 0:
        return CheckResult(False, "spin", f"i(M) = {format_barden(h.barden_i)}, spin required")
    t, tmax = t_invariants(h)
    if tmax > 1:
        return CheckResult(False, "coprime", "some prime carries two different orders")
    parts = coprime_parts(h)
    if parts is None:
        return CheckResult(False, "PairingFailure", "odd multiplicity")
    degrees = []
    for m, g in parts:
        d = is_triangular(g)
        if d is None:
            return CheckResult(False, "T", f"g = {g} (order {m}) is not triangular")
        degrees.append((m, d))
    bad_a = [(m, d) for m, d in degrees if gcd(m, d) != 1]
    bad_b = [(m, d) for m, d in degrees if gcd(m, d + 3) != 1]
    branches = tuple(b for b, bad in (("A", bad_a), ("B", bad_b)) if not bad)
    if branches:
        return CheckResult(True, None, "branch " + " and ".join(branches) + " holds", branches)
    detail = (
        "gcd(m, d) != 1 at " + ", ".join(f"(m, d) = ({m}, {d})" for m, d in bad_a)
        + "; gcd(m, d + 3) != 1 at " + ", ".join(f"(m, d) = ({m}, {d})" for m, d in bad_b)
    )
    return CheckResult(False, "KC", detail, (tuple(bad_a), tuple(bad_b)))


__all__ = [
    "Status", "TraceStep", "Verdict", "decide_negative_sasakian", "decide_sasakian",
    "decide_semiregular_sphere", "kcontact_sphere_necessary", "positive_table_member",
]
