"""Command-line front end.

Reports are ``KEY: value`` lines followed by a trace table. Exit status:
0 when a definitive answer was produced, 2 for Unknown, 1 for bad input or
a certificate that fails verification.
"""

from __future__ import annotations

import argparse
import itertools
import os
import sys
from pathlib import Path
from typing import Sequence, TextIO

from .abelian import (
    INF,
    H2Data,
    NotRealizable,
    barden_normal_form,
    format_barden,
    gk_check,
    kollar_obstruction,
    normalize,
    parse_barden,
    tstar_check,
)
from .certio import FormatError, dump_certificate, format_torsion, load_certificate, parse_torsion
from .construct import PreconditionViolated, construct_regular, regular_diffeo_name
from .decide import (
    Status,
    TraceStep,
    Verdict,
    decide_negative_sasakian,
    decide_sasakian,
    decide_semiregular_sphere,
    kcontact_sphere_necessary,
)
from .seifert import CertificateError, invariants_of, validate

OUTPUT_DIR_ENV = "SMALEBARDEN_OUTPUT_DIR"

EXIT_OK, EXIT_ERROR, EXIT_UNKNOWN = 0, 1, 2

QUERY_FIELDS = ("rank", "torsion", "barden_i", "mode")
QUERY_MODES = ("decide", "construct", "verify", "classify", "negative", "kcontact", "regular")


class InputError(ValueError):
    pass


# -- input ------------------------------------------------------------------


def parse_query_file(text: str) -> dict[str, str]:
    """``field: value`` lines; only rank, torsion, barden_i and mode are allowed."""
    out: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition(":")
        key = key.strip()
        if not sep:
            raise InputError(f"query line {lineno}: expected 'field: value', got {line!r}")
        if key not in QUERY_FIELDS:
            raise InputError(f"query line {lineno}: unknown field {key!r} (allowed: {', '.join(QUERY_FIELDS)})")
        if key in out:
            raise InputError(f"query line {lineno}: duplicate field {key!r}")
        out[key] = value.strip()
    if "mode" in out and out["mode"] not in QUERY_MODES:
        raise InputError(f"query: unknown mode {out['mode']!r} (allowed: {', '.join(QUERY_MODES)})")
    return out


def _query_h2(args: argparse.Namespace) -> H2Data:
    fields: dict[str, str] = {}
    if args.query:
        try:
            text = Path(args.query).read_text()
        except OSError as exc:
            raise InputError(f"cannot read query file: {exc}") from None
        fields = parse_query_file(text)
        mode = fields.get("mode")
        if mode and mode != args.command:
            raise InputError(f"query mode {mode!r} does not match command {args.command!r}")
    rank_text = args.rank if args.rank is not None else fields.get("rank", "0")
    torsion_text = args.torsion if args.torsion is not None else fields.get("torsion", "")
    i_text = args.i if args.i is not None else fields.get("barden_i", "0")
    try:
        rank = int(rank_text)
    except ValueError:
        raise InputError(f"rank: expected a non-negative integer, got {rank_text!r}") from None
    if rank < 0:
        raise InputError(f"rank: expected a non-negative integer, got {rank}")
    try:
        torsion = parse_torsion(torsion_text)
    except FormatError as exc:
        raise InputError(f"torsion {torsion_text!r}: {exc}") from None
    try:
        i = parse_barden(i_text)
    except ValueError as exc:
        raise InputError(f"i: {exc}") from None
    return normalize(torsion, rank, i)


# -- output -----------------------------------------------------------------


def _header(out: TextIO, items: Sequence[tuple[str, object]]) -> None:
    for key, value in items:
        out.write(f"{key}: {value}\n")


def _trace_table(out: TextIO, steps: Sequence[TraceStep]) -> None:
    out.write("trace:\n")
    if not steps:
        return
    w1 = max(len(s.check) for s in steps)
    w2 = max(len(s.outcome) for s in steps)
    for n, s in enumerate(steps, 1):
        out.write(f"  {n:>2}  {s.check:<{w1}}  {s.outcome:<{w2}}  {s.detail}\n".rstrip() + "\n")


def _query_line(h: H2Data) -> list[tuple[str, object]]:
    return [("rank", h.rank), ("torsion", format_torsion(h)), ("i", format_barden(h.barden_i))]


def _status_exit(v: Verdict) -> int:
    return EXIT_UNKNOWN if v.status is Status.UNKNOWN else EXIT_OK


def _output_dir() -> Path:
    return Path(os.environ.get(OUTPUT_DIR_ENV) or ".")


def _cert_filename(h: H2Data) -> str:
    torsion = h.torsion_text().replace("^", "p").replace(",", "_") or "free"
    return f"cert-k{h.rank}-{torsion}-i{format_barden(h.barden_i)}.txt"


def _emit(v: Verdict, h: H2Data, args: argparse.Namespace, force: bool) -> Path | None:
    if v.certificate is None or getattr(args, "no_emit", False):
        return None
    if args.emit:
        path = Path(args.emit)
    elif force or v.yes:
        path = _output_dir() / _cert_filename(h)
    else:
        return None
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dump_certificate(v.certificate, v.invariants.h2 if v.invariants else h))
    return path


def _report_verdict(out: TextIO, command: str, h: H2Data, v: Verdict, path: Path | None) -> None:
    items: list[tuple[str, object]] = [("command", command), *_query_line(h), ("status", v.status)]
    if v.note:
        items.append(("note", v.note))
    items.append(("obstruction", v.obstruction or "-"))
    items.append(("reason", v.reason))
    if v.certificate is not None:
        items.append(("surface", v.certificate.surface))
        items.append(("isotropy-curves", len(v.certificate.divisors)))
    if path is not None:
        items.append(("certificate", path))
    _header(out, items)
    _trace_table(out, v.trace)


# -- commands ---------------------------------------------------------------


def cmd_classify(args, out: TextIO) -> int:
    h = _query_h2(args)
    try:
        name = barden_normal_form(h)
    except NotRealizable as exc:
        raise InputError(f"no simply connected 5-manifold has these invariants: {exc}") from None
    _header(out, [("command", "classify"), *_query_line(h), ("name", name), ("summands", name.summands())])
    return EXIT_OK


def cmd_check(args, out: TextIO) -> int:
    h = _query_h2(args)
    results = [("G-K", gk_check(h))]
    if h.rank == 0:
        results.append(("Kollar-10", kollar_obstruction(h)))
        results.append(("T*_p", tstar_check(h)))
    items: list[tuple[str, object]] = [("command", "check"), *_query_line(h)]
    for label, r in results:
        items.append((label, "pass" if r else f"fail [{r.clause}]"))
    _header(out, items)
    _trace_table(out, [TraceStep(label, "pass" if r else "fail", r.detail) for label, r in results])
    return EXIT_OK


def _run_decision(args, out: TextIO, fn, force_emit: bool) -> int:
    h = _query_h2(args)
    try:
        v = fn(h)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    path = _emit(v, h, args, force_emit)
    _report_verdict(out, args.command, h, v, path)
    return _status_exit(v)


def cmd_decide(args, out):
    return _run_decision(args, out, decide_sasakian, False)


def cmd_construct(args, out):
    return _run_decision(args, out, decide_sasakian, True)


def cmd_negative(args, out):
    return _run_decision(args, out, decide_negative_sasakian, False)


def cmd_sphere(args, out):
    return _run_decision(args, out, decide_semiregular_sphere, False)


def cmd_kcontact(args, out: TextIO) -> int:
    h = _query_h2(args)
    try:
        r = kcontact_sphere_necessary(h)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    items: list[tuple[str, object]] = [("command", "kcontact"), *_query_line(h)]
    items.append(("necessary-condition", "pass" if r else "fail"))
    items.append(("clause", r.clause or "-"))
    if r:
        items.append(("branches", ",".join(r.witness)))
    items.append(("detail", r.detail))
    _header(out, items)
    return EXIT_OK


def cmd_regular(args, out: TextIO) -> int:
    h = _query_h2(args)
    if h.torsion:
        raise InputError("regular: torsion must be empty")
    if h.barden_i not in (0, INF):
        raise InputError(f"regular: i must be 0 or inf, got {format_barden(h.barden_i)}")
    try:
        cert = construct_regular(h.rank, h.barden_i == 0)
    except PreconditionViolated as exc:
        raise InputError(f"regular: {exc}") from None
    name = regular_diffeo_name(cert)
    inv = invariants_of(cert)
    v = Verdict(Status.PROVABLY_YES, cert, None, f"circle bundle with e = {cert.bclass}",
                [TraceStep("verify", "pass", str(inv.h2))], inv)
    path = _emit(v, h, args, False)
    _report_verdict(out, "regular", h, v, path)
    _header(out, [("name", name), ("summands", name.summands())])
    return EXIT_OK


def cmd_verify(args, out: TextIO) -> int:
    try:
        text = Path(args.file).read_text()
    except OSError as exc:
        raise InputError(f"cannot read certificate: {exc}") from None
    try:
        cert, claims = load_certificate(text)
    except (FormatError, ValueError) as exc:
        raise InputError(f"{args.file}: {exc}") from None
    items: list[tuple[str, object]] = [("command", "verify"), ("file", args.file), ("surface", cert.surface)]
    violations = validate(cert)
    if violations:
        items.append(("result", "invalid"))
        items += [("violation", str(v)) for v in violations]
        _header(out, items)
        return EXIT_ERROR
    try:
        inv = invariants_of(cert)
    except CertificateError as exc:
        items.append(("result", "invalid"))
        items += [("violation", str(v)) for v in exc.violations] or [("violation", str(exc))]
        _header(out, items)
        return EXIT_ERROR
    items += [*_query_line(inv.h2), ("spin", "yes" if inv.spin else "no"),
              ("kahler", "yes" if inv.kahler else "no"),
              ("pi1-abelian", "yes" if inv.pi1_abelian_assumed else "no")]
    ok = inv.kahler and inv.pi1_abelian_assumed
    if claims is not None:
        diffs = []
        if claims.rank != inv.h2.rank:
            diffs.append(f"rank: claimed {claims.rank}, verified {inv.h2.rank}")
        if H2Data(0, claims.torsion) != H2Data(0, inv.h2.torsion):
            diffs.append(f"torsion: claimed {format_torsion(claims)}, verified {format_torsion(inv.h2)}")
        if claims.barden_i != inv.h2.barden_i:
            diffs.append(f"i: claimed {format_barden(claims.barden_i)}, verified {format_barden(inv.h2.barden_i)}")
        items += [("claim-mismatch", d) for d in diffs]
        ok = ok and not diffs
    items.append(("result", "verified" if ok else "mismatch"))
    _header(out, items)
    return EXIT_OK if ok else EXIT_ERROR


def atlas_shapes(max_order: int, max_count: int, max_parts: int):
    """Torsion shapes ``[(m_1, c_1), ...]`` with ``2 <= m_1 < m_2 < ... <= max_order`` and ``sum c_i <= max_count``."""
    for r in range(1, max_parts + 1):
        for orders in itertools.combinations(range(2, max_order + 1), r):
            for counts in itertools.product(range(1, max_count + 1), repeat=r):
                if sum(counts) <= max_count:
                    yield list(zip(orders, counts))


def cmd_atlas(args, out: TextIO) -> int:
    if args.max_order < 2 or args.max_count < 1 or args.max_parts < 1:
        raise InputError("atlas: need --max-order >= 2, --max-count >= 1, --max-parts >= 1")
    try:
        i = parse_barden(args.i if args.i is not None else "0")
    except ValueError as exc:
        raise InputError(f"i: {exc}") from None
    rank = int(args.rank or 0)
    tally: dict[str, int] = {}
    rows = []
    for shape in atlas_shapes(args.max_order, args.max_count, args.max_parts):
        h = normalize(shape, rank, i)
        v = decide_sasakian(h)
        key = f"{v.status}" + (f" [{v.obstruction}]" if v.obstruction else "")
        tally[key] = tally.get(key, 0) + 1
        rows.append((format_torsion(h), str(v.status), v.obstruction or "-"))
    _header(out, [("command", "atlas"), ("rank", rank), ("i", format_barden(i)),
                  ("max-order", args.max_order), ("max-count", args.max_count),
                  ("max-parts", args.max_parts), ("queries", len(rows))])
    for key in sorted(tally):
        out.write(f"count: {key} = {tally[key]}\n")
    out.write("table:\n")
    w = max((len(r[0]) for r in rows), default=0)
    for torsion, status, obstruction in rows:
        out.write(f"  {torsion:<{w}}  {status:<11}  {obstruction}\n")
    return EXIT_OK


# -- parser -----------------------------------------------------------------


def _query_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--rank", help="free rank k of H_2 (default 0)")
    p.add_argument("--torsion", help="torsion as ORDER^COUNT,... e.g. 3^2,5^4 (COUNT is the total multiplicity)")
    p.add_argument("--i", help="Barden invariant: 0, inf or a positive integer (default 0)")
    p.add_argument("--query", metavar="FILE", help="read rank/torsion/barden_i/mode from FILE")


def _emit_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--emit", metavar="PATH", help=f"certificate path (default: ${OUTPUT_DIR_ENV} or .)")
    p.add_argument("--no-emit", action="store_true", help="do not write a certificate file")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="smalebarden",
        description="Sasakian structures on simply connected 5-manifolds: classify, check, decide, construct, verify.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    specs = [
        ("classify", cmd_classify, "Barden name of (H_2, i)", False),
        ("check", cmd_check, "necessary conditions (G-K, Kollar, T*_p)", False),
        ("decide", cmd_decide, "Sasakian existence with certificate or obstruction", True),
        ("construct", cmd_construct, "like decide, always writing the certificate", True),
        ("negative", cmd_negative, "negative Sasakian structure on a rational homology sphere", True),
        ("sphere", cmd_sphere, "semi-regular Sasakian rational homology sphere (yes/no)", True),
        ("kcontact", cmd_kcontact, "necessary condition for semi-regular K-contact spheres", False),
        ("regular", cmd_regular, "regular Sasakian structure for torsion-free H_2", True),
    ]
    for name, fn, help_text, emits in specs:
        p = sub.add_parser(name, help=help_text)
        _query_args(p)
        if emits:
            _emit_args(p)
        p.set_defaults(func=fn)
    p = sub.add_parser("verify", help="re-verify a certificate file against its claims")
    p.add_argument("file")
    p.set_defaults(func=cmd_verify)
    p = sub.add_parser("atlas", help="tabulate decide verdicts over small torsion shapes")
    p.add_argument("--max-order", type=int, default=20, help="largest cyclic order (default 20)")
    p.add_argument("--max-count", type=int, default=12, help="bound on the summed multiplicities (default 12)")
    p.add_argument("--max-parts", type=int, default=2, help="most distinct orders per shape (default 2)")
    p.add_argument("--rank", type=int, default=0, help="free rank used for every query (default 0)")
    p.add_argument("--i", default="0", help="Barden invariant used for every query (default 0)")
    p.set_defaults(func=cmd_atlas)
    return parser


def main(argv: Sequence[str] | None = None, out: TextIO | None = None, err: TextIO | None = None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_ERROR if exc.code else EXIT_OK
    try:
        return args.func(args, out)
    except InputError as exc:
        err.write(f"error: {exc}\n")
        return EXIT_ERROR
    except BrokenPipeError:
        # reader went away (e.g. piped into head)
        sys.stdout = None
        return EXIT_OK


def run(argv: Sequence[str]) -> int:
    return main(list(argv))


if __name__ == "__main__":
    sys.exit(main())
