import pytest
from hypothesis import given
from hypothesis import strategies as st

from matchtor.builders import build_matching_complex, build_reduced_quotient
from matchtor.combinatorics import Charge, Signature
from matchtor.decomposition import (
    SignVectorPiece,
    aggregate,
    decompose_matching_homology,
    decomposition_json,
    decomposition_markdown,
    kr_parameters,
    nd_parameters,
    piece_signature,
)
from matchtor.homology import HomologyGroup, homology


def free_ranks(dec, d):
    return [pc.homology[d].free_rank if d in pc.homology else 0 for pc in dec.pieces]


def test_piece_signature_layout():
    sig = piece_signature(9, 4, 3)
    assert str(sig) == "2+,2-,2-,2-,1+"
    dec = decompose_matching_homology(9, 4)
    assert sum(pc.multiplicity for pc in dec.pieces) == 16
    with pytest.raises(ValueError):
        piece_signature(5, 3, 0)


def test_five_two():
    dec = decompose_matching_homology(5, 2)
    assert [pc.multiplicity for pc in dec.pieces] == [1, 2, 1]
    assert free_ranks(dec, 1) == [1, 2, 1]
    assert dec.aggregate[1] == HomologyGroup(6)


def test_six_three():
    dec = decompose_matching_homology(6, 3)
    assert free_ranks(dec, 1) == [2, 2, 2, 2]
    assert [pc.multiplicity for pc in dec.pieces] == [1, 3, 3, 1]
    assert dec.aggregate[1] == HomologyGroup(16)


def test_nine_four():
    dec = decompose_matching_homology(9, 4)
    last = dec.pieces[-1]
    assert last.multiplicity == 1
    assert last.homology[2] == HomologyGroup(3, ((3, 1, 4),))
    assert dec.aggregate[2] == HomologyGroup(42, ((3, 1, 8),))
    assert dec.aggregate[3] == HomologyGroup(70)


@pytest.mark.parametrize("n", range(2, 10))
def test_aggregate_rational_betti_equals_direct(n):
    direct = homology(build_matching_complex(n), "Q")
    for r in range(0, n // 2 + 1):
        dec = decompose_matching_homology(n, r, ring="Z~")
        agg = {d: h.free_rank for d, h in dec.aggregate.items() if h.free_rank}
        assert agg == {d: h.free_rank for d, h in direct.items() if h.free_rank}


@pytest.mark.parametrize("n,r", [(7, 3), (8, 2), (9, 4), (9, 3)])
def test_aggregate_equals_direct_away_from_two(n, r):
    direct = homology(build_matching_complex(n), "Z~")
    dec = decompose_matching_homology(n, r)
    assert {d: h for d, h in dec.aggregate.items() if not h.is_zero()} == \
        {d: h for d, h in direct.items() if not h.is_zero()}


@pytest.mark.parametrize("sizes,i", [((2, 2, 2, 1), 1), ((2, 2, 2, 2, 1), 2), ((2, 2, 2, 2), 3)])
def test_sign_order_does_not_matter(sizes, i):
    r = sum(1 for s in sizes if s == 2)
    base = [Charge.POS] * (r - i) + [Charge.NEG] * i
    tail = [Charge.POS] * (len(sizes) - r)
    a = homology(build_reduced_quotient(Signature.of(sizes, base + tail)), "Z~")
    b = homology(build_reduced_quotient(Signature.of(sizes, base[::-1] + tail)), "Z~")
    assert {d: h for d, h in a.items() if not h.is_zero()} == {d: h for d, h in b.items() if not h.is_zero()}


def test_aggregate_examples():
    one = SignVectorPiece(0, piece_signature(2, 1, 0), 1, {0: HomologyGroup(2, ((3, 1, 1),))})
    assert aggregate([one]) == {0: HomologyGroup(2, ((3, 1, 1),))}
    a = SignVectorPiece(0, piece_signature(4, 1, 0), 2, {1: HomologyGroup(1, ((3, 1, 1),))})
    b = SignVectorPiece(1, piece_signature(4, 1, 1), 1, {1: HomologyGroup(0, ((3, 1, 1),))})
    assert aggregate([a, b]) == {1: HomologyGroup(2, ((3, 1, 3),))}


def test_budget_breach_marks_partial():
    dec = decompose_matching_homology(7, 3, cap=5)
    assert dec.partial and all(pc.error for pc in dec.pieces)


def test_modular_mode_and_output():
    dec = decompose_matching_homology(7, 3, primes=(3, 5))
    rep = decomposition_json(dec)
    assert rep["mode"] == "modular" and rep["ring"] == "Z~"
    assert rep["aggregate"]["mod_p_ranks"]["3"]["1"] == 1
    assert rep["aggregate"]["betti"]["2"] == 20
    assert "rho3=1" in decomposition_markdown(dec)


def test_markdown_layout():
    text = decomposition_markdown(decompose_matching_homology(7, 3))
    rows = [ln for ln in text.splitlines() if ln.startswith("| ")]
    assert rows[0] == "| signs | d=1 | d=2 | factor |"
    assert rows[1:] == [
        "| +++ | - | Z | 1 |",
        "| ++- | - | Z^3 | 3 |",
        "| +-- | - | Z^3 | 3 |",
        "| --- | Z_3 | Z | 1 |",
        "| total | Z_3 | Z^20 | |",
    ]


def test_kr_examples():
    assert kr_parameters(7, 1) == (0, 2)
    assert kr_parameters(14, 4) == (2, 3)
    assert kr_parameters(23, 8) == (5, 4)
    assert nd_parameters(5, 4) == (23, 8)


def test_kr_round_trip_exhaustive():
    for n in range(1, 101):
        for d in range(-1, n + 1):
            assert nd_parameters(*kr_parameters(n, d)) == (n, d)


@given(st.integers(-10**6, 10**6), st.integers(-10**6, 10**6))
def test_kr_inverse_round_trip(k, r):
    assert kr_parameters(*nd_parameters(k, r)) == (k, r)
