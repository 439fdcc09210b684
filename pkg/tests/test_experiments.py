import dataclasses
import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from heckewind.experiments import (
    independence_certificate,
    magma_transcript,
    parse_symbol_expression,
    render_symbol_expression,
    scan_csv,
    scan_primes,
    verify_certificate,
)
from heckewind.linalg import InvalidModulusError


@pytest.mark.parametrize("level,k", [(23, 1), (11, 2), (7, 3)])
@pytest.mark.parametrize("style", ["magma", "plain"])
@settings(max_examples=20, deadline=None)
@given(data=st.data())
def test_render_parse_round_trip(space_cache, level, k, style, data):
    s = space_cache(level, k)
    v = np.array(data.draw(st.lists(st.integers(-9, 9), min_size=s.dim_full, max_size=s.dim_full)), dtype=object)
    text = render_symbol_expression(s, v, style)
    assert list(parse_symbol_expression(s, text)) == list(v)


def test_parse_external_notation(space_cache):
    s = space_cache(23, 1)
    # generators other than the ones we print, same class
    a = parse_symbol_expression(s, "{-1/19, 0} + -1*{-1/17, 0} + -1*{-1/11, 0} + -4*{oo, 0}")
    b = parse_symbol_expression(s, "-1*{-1/15, 0} + {-1/13, 0} + -1*{-1/11, 0} + -4*{oo, 0}")
    assert list(a) == list(b)
    assert list(parse_symbol_expression(s, "0")) == [0] * s.dim_full
    with pytest.raises(ValueError):
        parse_symbol_expression(s, "3*{oo 0}")


def test_parse_rejects_wrong_degree(space_cache):
    with pytest.raises(ValueError):
        parse_symbol_expression(space_cache(11, 2), "(X^3)*{0, oo}")


def test_transcript_shape(space_cache):
    t = magma_transcript(space_cache(23, 1), 5)
    assert [name for name, _ in t] == ["E", "E*T2", "E*T3", "E*T4", "E*T5"]


@pytest.mark.parametrize("modulus", [None, 3, 5])
def test_certificates_verify(space_cache, modulus):
    s = space_cache(23, 1)
    for D in (1, 2, 3, 4):
        cert = independence_certificate(s, D, modulus)
        assert cert.rank == min(D, 2)
        assert cert.verdict == ("independent" if D <= 2 else "dependent")
        assert verify_certificate(cert, s)
        json.dumps(cert.to_json())


def test_tampered_certificates_fail(space_cache):
    s = space_cache(23, 1)
    dep = independence_certificate(s, 4)
    bad = dataclasses.replace(dep, witness={"kind": "dependence", "vector": [1, 0, 0, 0]})
    assert not verify_certificate(bad, s)
    bad = dataclasses.replace(dep, input_hash="0" * 64)
    assert not verify_certificate(bad, s)
    ind = independence_certificate(s, 2)
    bad = dataclasses.replace(ind, witness={**ind.witness, "determinant": "12345"})
    assert not verify_certificate(bad, s)


def test_full_frame_certificate(space_cache):
    s = space_cache(23, 1)
    cert = independence_certificate(s, 4, frame="full")
    assert cert.verdict == "dependent" and verify_certificate(cert, s)


def test_zero_space_is_dependent(space_cache):
    cert = independence_certificate(space_cache(7, 1), 2)
    assert cert.rank == 0 and cert.verdict == "dependent"
    assert verify_certificate(cert, space_cache(7, 1))


def test_bad_modulus(space_cache):
    with pytest.raises(InvalidModulusError):
        independence_certificate(space_cache(23, 1), 2, modulus=9)


def test_scan_resume(tmp_path):
    journal = str(tmp_path / "scan.log")
    first = scan_primes(1, 2, range(5, 40), journal=journal)
    lines = open(journal).read().splitlines()
    assert len(lines) == len(first)
    again = scan_primes(1, 2, range(5, 48), journal=journal)
    assert again[: len(first)] == first
    assert len(open(journal).read().splitlines()) == len(again)
    csv = scan_csv(again)
    assert csv.splitlines()[0] == "p,rank,verdict"
    assert {r.verdict for r in again} <= {"independent", "dependent"}


def test_scan_parallel_matches_serial():
    serial = scan_primes(1, 3, range(30, 80))
    assert scan_primes(1, 3, range(30, 80), jobs=2) == serial


def test_scan_skips_modulus_dividing_level():
    rows = scan_primes(1, 2, [5, 7, 11], modulus=5)
    assert rows[0].verdict == "skipped"
