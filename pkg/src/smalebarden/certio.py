"""Canonical text form of Seifert certificates and torsion strings.

A certificate file is a list of ``key: value`` lines in a fixed order::

    seifert-certificate: 1
    surface: BlowUp(1)
    basis: H E
    divisor: 5 -3 | m=3 | b=1 | genus=3
    bclass: 3 -1
    assumption: smooth-transverse-divisors
    claim-rank: 1
    claim-torsion: 3^2,5^4
    claim-i: 0

The ``claim-*`` lines are optional. :func:`dump_certificate` and
:func:`load_certificate` are inverse, so a dumped file reloads and dumps
to the same bytes.
"""

from __future__ import annotations

import re

from .abelian import H2Data, format_barden, normalize, parse_barden
from .lattice import SurfaceLattice
from .seifert import OrbitDivisor, SeifertCertificate

FORMAT_VERSION = "1"


class FormatError(ValueError):
    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        where = ", ".join(
            f"{label} {value}" for label, value in (("line", line), ("column", column)) if value is not None
        )
        where = where + ": " if where else ""
        super().__init__(where + message)
        self.line = line
        self.column = column


_TORSION_ITEM = re.compile(r"\s*(\d+)\s*\^\s*(\d+)\s*")


def parse_torsion(text: str) -> list[tuple[int, int]]:
    """``"3^2,5^4"`` to ``[(3, 2), (5, 4)]``; ``""``, ``"0"`` and ``"none"`` mean no torsion.

    The exponent is the total multiplicity of the cyclic factor.
    """
    t = text.strip()
    if t in ("", "0", "none"):
        return []
    out = []
    col = 1
    for item in text.split(","):
        match = _TORSION_ITEM.fullmatch(item)
        if not match:
            raise FormatError(f"bad torsion item {item.strip()!r}, expected ORDER^COUNT", column=col)
        m, c = int(match.group(1)), int(match.group(2))
        if m < 2 or c < 1:
            raise FormatError(f"torsion item {item.strip()!r} needs order >= 2 and count >= 1", column=col)
        out.append((m, c))
        col += len(item) + 1
    return out


def format_torsion(h: H2Data) -> str:
    return h.torsion_text() or "none"


def _format_divisor(d: OrbitDivisor) -> str:
    return f"{' '.join(map(str, d.cls.coeffs))} | m={d.m} | b={d.b} | genus={d.genus}"


def dump_certificate(cert: SeifertCertificate, claims: H2Data | None = None) -> str:
    lines = [
        f"seifert-certificate: {FORMAT_VERSION}",
        f"surface: {cert.surface.name}",
        f"basis: {' '.join(cert.surface.basis_labels)}",
    ]
    lines += [f"divisor: {_format_divisor(d)}" for d in cert.divisors]
    lines.append(f"bclass: {' '.join(map(str, cert.bclass.coeffs))}")
    lines += [f"assumption: {a}" for a in cert.assumptions]
    if claims is not None:
        lines += [
            f"claim-rank: {claims.rank}",
            f"claim-torsion: {format_torsion(claims)}",
            f"claim-i: {format_barden(claims.barden_i)}",
        ]
    return "\n".join(lines) + "\n"


_ORDER = ["seifert-certificate", "surface", "basis", "divisor", "bclass", "assumption",
          "claim-rank", "claim-torsion", "claim-i"]
_REPEATABLE = {"divisor", "assumption"}


def _ints(text: str, lineno: int, n: int) -> tuple[int, ...]:
    parts = text.split()
    try:
        values = tuple(int(p) for p in parts)
    except ValueError:
        raise FormatError(f"expected integers, got {text!r}", lineno) from None
    if len(values) != n:
        raise FormatError(f"expected {n} coefficients, got {len(values)}", lineno)
    return values


def _parse_divisor(text: str, lattice: SurfaceLattice, lineno: int) -> OrbitDivisor:
    fields = [f.strip() for f in text.split("|")]
    if len(fields) != 4:
        raise FormatError("divisor needs 'COEFFS | m=M | b=B | genus=G'", lineno)
    coeffs = _ints(fields[0], lineno, lattice.b2)
    values = {}
    for want, f in zip(("m", "b", "genus"), fields[1:]):
        key, sep, val = f.partition("=")
        if key.strip() != want or not sep:
            raise FormatError(f"expected '{want}=...', got {f!r}", lineno)
        try:
            values[want] = int(val)
        except ValueError:
            raise FormatError(f"{want} must be an integer, got {val.strip()!r}", lineno) from None
    return OrbitDivisor(lattice.cls(*coeffs), values["m"], values["b"], values["genus"])


def load_certificate(text: str) -> tuple[SeifertCertificate, H2Data | None]:
    """Parse a certificate and its optional claimed invariants.

    Structural problems (unknown keys, wrong order, wrong coefficient
    counts) raise :class:`FormatError` with the line number. Whether the
    data is a valid Seifert bundle is left to the verifier.
    """
    entries: list[tuple[int, str, str]] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        if not raw.strip() or raw.lstrip().startswith("#"):
            continue
        key, sep, value = raw.partition(":")
        key = key.strip()
        if not sep or key not in _ORDER:
            raise FormatError(f"unknown or malformed line {raw.strip()!r}", lineno)
        entries.append((lineno, key, value.strip()))
    rank = -1
    seen: dict[str, int] = {}
    for lineno, key, _ in entries:
        r = _ORDER.index(key)
        if r < rank:
            raise FormatError(f"'{key}' out of order", lineno)
        if key in seen and key not in _REPEATABLE:
            raise FormatError(f"duplicate '{key}'", lineno)
        seen[key] = lineno
        rank = r
    for key in ("seifert-certificate", "surface", "bclass"):
        if key not in seen:
            raise FormatError(f"missing '{key}' line")
    lattice = None
    divisors = []
    bclass = None
    assumptions = []
    claim = {}
    for lineno, key, value in entries:
        if key == "seifert-certificate":
            if value != FORMAT_VERSION:
                raise FormatError(f"unsupported format version {value!r}", lineno)
        elif key == "surface":
            try:
                lattice = SurfaceLattice.parse(value)
            except ValueError as exc:
                raise FormatError(str(exc), lineno) from None
        elif key == "basis":
            if tuple(value.split()) != lattice.basis_labels:
                raise FormatError(
                    f"basis {value!r} does not match {lattice.name} ({' '.join(lattice.basis_labels)})", lineno
                )
        elif key == "divisor":
            divisors.append(_parse_divisor(value, lattice, lineno))
        elif key == "bclass":
            bclass = lattice.cls(*_ints(value, lineno, lattice.b2))
        elif key == "assumption":
            assumptions.append(value)
        else:
            claim[key] = (lineno, value)
    cert = SeifertCertificate(lattice, tuple(divisors), bclass, tuple(assumptions))
    claims = None
    if claim:
        missing = {"claim-rank", "claim-torsion", "claim-i"} - claim.keys()
        if missing:
            raise FormatError(f"incomplete claims, missing {', '.join(sorted(missing))}")
        try:
            lineno, v = claim["claim-rank"]
            rank_value = int(v)
            lineno, v = claim["claim-torsion"]
            torsion = parse_torsion(v)
            lineno, v = claim["claim-i"]
            i = parse_barden(v)
            claims = normalize(torsion, rank_value, i)
        except FormatError as exc:
            raise FormatError(str(exc), lineno) from None
        except ValueError as exc:
            raise FormatError(str(exc), lineno) from None
    return cert, claims


__all__ = ["FormatError", "dump_certificate", "format_torsion", "load_certificate", "parse_torsion"]
