from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from smalebarden.abelian import INF, normalize
from smalebarden.certio import FormatError, dump_certificate, format_torsion, load_certificate, parse_torsion
from smalebarden.construct import RankOneRequest, blowup_raise_rank, construct_rank_one, construct_sphere, SphereRequest
from smalebarden.decide import decide_sasakian
from smalebarden.seifert import invariants_of

SAMPLE = """\
seifert-certificate: 1
surface: CP1xCP1
basis: H1 H2
divisor: 2 2 | m=3 | b=1 | genus=1
divisor: 2 3 | m=5 | b=1 | genus=2
bclass: -1 -1
assumption: smooth-transverse-divisors
assumption: abelian-complement-pi1
claim-rank: 1
claim-torsion: 3^2,5^4
claim-i: 0
"""


def test_parse_torsion():
    assert parse_torsion("3^2,5^4") == [(3, 2), (5, 4)]
    assert parse_torsion(" 3 ^ 2 , 5^4 ") == [(3, 2), (5, 4)]
    for empty in ("", "0", "none", "  "):
        assert parse_torsion(empty) == []


def test_parse_torsion_errors_carry_column():
    with pytest.raises(FormatError) as info:
        parse_torsion("3^2,x")
    assert info.value.column == 5 and "column 5" in str(info.value)
    with pytest.raises(FormatError):
        parse_torsion("1^2")
    with pytest.raises(FormatError):
        parse_torsion("3^0")


def test_format_torsion():
    assert format_torsion(normalize([(5, 4), (3, 2)])) == "3^2,5^4"
    assert format_torsion(normalize([])) == "none"


def test_sample_loads():
    cert, claims = load_certificate(SAMPLE)
    assert claims == normalize([(3, 2), (5, 4)], 1, 0)
    assert invariants_of(cert).h2 == claims
    assert dump_certificate(cert, claims) == SAMPLE


def test_roundtrip_is_byte_identical():
    certs = [
        construct_rank_one(RankOneRequest(((3, 1), (5, 2)), True)),
        blowup_raise_rank(construct_rank_one(RankOneRequest(((2, 2), (3, 1)), True)), True),
        construct_sphere(SphereRequest(((7, 3), (11, 1)))),
    ]
    for c in certs:
        text = dump_certificate(c, invariants_of(c).h2)
        again, claims = load_certificate(text)
        assert again == c
        assert dump_certificate(again, claims) == text
        assert dump_certificate(load_certificate(dump_certificate(c))[0]) == dump_certificate(c)


@settings(max_examples=60, deadline=None)
@given(
    st.lists(st.tuples(st.sampled_from([2, 3, 5, 7, 9, 11]), st.integers(1, 4)), max_size=2, unique_by=lambda t: t[0]),
    st.integers(0, 3),
    st.sampled_from([0, INF]),
)
def test_roundtrip_decide_certificates(pairs, k, i):
    h = normalize([(m, 2 * g) for m, g in pairs], k, i)
    v = decide_sasakian(h)
    if not v.yes:
        return
    text = dump_certificate(v.certificate, h)
    cert, claims = load_certificate(text)
    assert claims == h and invariants_of(cert).h2 == h
    assert dump_certificate(cert, claims) == text


def test_comments_and_blank_lines_ignored():
    text = "# produced by hand\n\n" + SAMPLE
    assert load_certificate(text)[1] is not None


def bad(text, line=None, match=None):
    with pytest.raises(FormatError, match=match) as info:
        load_certificate(text)
    if line is not None:
        assert info.value.line == line
    return info.value


def test_unknown_key():
    bad(SAMPLE.replace("bclass:", "bclas:"), line=6, match="unknown")


def test_out_of_order():
    lines = SAMPLE.splitlines()
    lines[5], lines[3] = lines[3], lines[5]
    bad("\n".join(lines), match="out of order")


def test_duplicate_surface():
    bad(SAMPLE.replace("basis: H1 H2", "surface: CP2"), line=3, match="duplicate")


def test_missing_bclass():
    bad(SAMPLE.replace("bclass: -1 -1\n", ""), match="bclass")


def test_wrong_coefficient_count():
    bad(SAMPLE.replace("bclass: -1 -1", "bclass: -1"), line=6, match="2 coefficients")


def test_wrong_basis():
    bad(SAMPLE.replace("basis: H1 H2", "basis: H E"), line=3, match="basis")


def test_bad_divisor_field():
    bad(SAMPLE.replace("m=3", "n=3"), line=4, match="m=")
    bad(SAMPLE.replace("b=1 | genus=1", "b=x | genus=1"), line=4, match="integer")


def test_incomplete_claims():
    bad(SAMPLE.replace("claim-i: 0\n", ""), match="claim-i")


def test_bad_claim_value():
    bad(SAMPLE.replace("claim-torsion: 3^2,5^4", "claim-torsion: 3^2,q"), line=10)
    bad(SAMPLE.replace("claim-i: 0", "claim-i: -4"), line=11)


def test_unsupported_version():
    bad(SAMPLE.replace("seifert-certificate: 1", "seifert-certificate: 2"), line=1, match="version")


def test_no_floats_in_output():
    text = dump_certificate(construct_rank_one(RankOneRequest(((3, 1), (5, 2)), False)))
    assert "." not in text.replace("smooth-transverse-divisors", "")
