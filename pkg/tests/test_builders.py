import itertools
import warnings
import pytest
from hypothesis import given
from hypothesis import strategies as st

from matchtor.builders import (
    PositiveBlockWarning,
    build_bd_complex,
    build_delta_quotient,
    build_lie_complex,
    build_matching_complex,
    build_norm_subcomplex_from_matching,
    build_reduced_quotient,
    build_wreath_quotient,
    lie_sign,
    phi_map,
)
from matchtor.chain import BudgetExceeded, same_complex, verify_d_squared
from matchtor.combinatorics import BlockPartition, Charge, Signature
from matchtor.homology import HomologyGroup, homology

from .oracles import factors_to_prime_powers, group_summary, homology_via_sympy


def nonzero(h):
    return {d: g for d, g in h.items() if not g.is_zero()}


def Zt(free=0, **tors):
    """HomologyGroup shorthand: Zt(3, t3=4) is Z^3 + (Z_3)^4."""
    return HomologyGroup(free, tuple((int(k[1:]), 1, m) for k, m in tors.items()))


def compositions(n):
    if n == 0:
        yield ()
        return
    for k in range(1, n + 1):
        for rest in compositions(n - k):
            yield (k,) + rest


def partitions(n, top=None):
    if n == 0:
        yield ()
        return
    for k in range(min(n, top or n), 0, -1):
        for rest in partitions(n - k, k):
            yield (k,) + rest


# -- matching and BD complexes ----------------------------------------------------


@pytest.mark.parametrize("n,expected", [
    (3, {0: Zt(2)}),
    (4, {0: Zt(2)}),
    (5, {1: Zt(6)}),
    (7, {1: Zt(t3=1), 2: Zt(20)}),
])
def test_matching_small(n, expected):
    cx = build_matching_complex(n)
    assert verify_d_squared(cx)
    assert cx.bases[-1] == [()]
    assert nonzero(homology(cx, "Z")) == expected


def test_matching_size_cap():
    with pytest.raises(BudgetExceeded):
        build_matching_complex(8, cap=50)


def test_bd_two_single_vertices_is_acyclic():
    cx = build_bd_complex(Signature.parse("1+,1+"))
    assert cx.ranks() == {-1: 1, 0: 1}
    assert nonzero(homology(cx, "Z")) == {}


def test_bd_two_twos_against_sympy():
    cx = build_bd_complex(Signature.parse("2+,2+"))
    want = homology_via_sympy(cx)
    got = homology(cx, "Z")
    for d in cx.degrees:
        assert group_summary(got[d]) == (want[d][0], factors_to_prime_powers(want[d][1]))


def test_bd_requires_positive_signature():
    with pytest.raises(ValueError):
        build_bd_complex(Signature.parse("2+,2-"))


@pytest.mark.parametrize("text", ["2+,2+", "2+,2+,2+", "1+,2+,3+", "2+,2+,1+,1+"])
def test_delta_all_positive_coincides_with_bd(text):
    sig = Signature.parse(text)
    bd, delta = build_bd_complex(sig), build_delta_quotient(sig)
    assert bd.bases == delta.bases
    assert same_complex(bd, delta)


# -- reduced and Delta quotients ----------------------------------------------------


@pytest.mark.parametrize("text,expected", [
    ("2-,2-,1-", {1: Zt(1)}),
    ("2-,2-,2-,1-", {1: Zt(t3=1), 2: Zt(1)}),
])
def test_reduced_examples(text, expected):
    assert nonzero(homology(build_reduced_quotient(Signature.parse(text)), "Z")) == expected


def test_reduced_m14_signature_has_order_five():
    h = homology(build_reduced_quotient(Signature.parse("2+,3-,3-,3-,3-")), "Z")
    assert h[4].p_rank(5) >= 1


def test_charge_of_size_one_parts_is_irrelevant():
    a = homology(build_reduced_quotient(Signature.parse("2-,2-,1-")), "Z")
    b = homology(build_reduced_quotient(Signature.parse("2-,2-,1+")), "Z")
    assert nonzero(a) == nonzero(b)


def test_signed_versus_unsigned_torsion():
    neg = homology(build_delta_quotient(Signature.parse("1-,2-,2-,2-")), "Z")
    pos = homology(build_delta_quotient(Signature.parse("1+,2+,2+,2+")), "Z")
    assert any(h.p_rank(3) for h in neg.values())
    assert all(not h.torsion for h in pos.values())


def _delta_cases():
    out = []
    for n in range(1, 8):
        for lam in partitions(n):
            for ch in itertools.product([1, -1], repeat=len(lam)):
                out.append(Signature.of(lam, ch))
    return out


DELTA_CASES = _delta_cases()


def test_delta_and_reduced_homology_agree_exhaustively_to_n7():
    for sig in DELTA_CASES:
        d = build_delta_quotient(sig)
        r = build_reduced_quotient(sig)
        assert verify_d_squared(d) and verify_d_squared(r)
        assert nonzero(homology(d, "Z", check=False)) == nonzero(homology(r, "Z", check=False)), str(sig)


@given(st.lists(st.tuples(st.integers(1, 3), st.sampled_from([Charge.POS, Charge.NEG])),
                min_size=1, max_size=5))
def test_delta_and_reduced_homology_agree_random(parts):
    sig = Signature(tuple(parts))
    d = build_delta_quotient(sig)
    if sum(d.ranks().values()) > 50_000:
        return
    r = build_reduced_quotient(sig)
    assert nonzero(homology(d, "Z")) == nonzero(homology(r, "Z"))


# -- norm subcomplexes of M_n ----------------------------------------------------------


def _norm_cases():
    out = []
    for n in range(1, 9):
        for lam in partitions(n):
            seen = set()
            for ch in itertools.product([1, -1], repeat=len(lam)):
                key = tuple(sorted(zip(lam, ch)))
                if key not in seen:
                    seen.add(key)
                    out.append(Signature.of(lam, ch))
    return out


def test_norm_subcomplex_matches_reduced_up_to_n8():
    cases = _norm_cases()
    assert len(cases) > 400
    for sig in cases:
        q = build_norm_subcomplex_from_matching(sig.n, sig)
        assert verify_d_squared(q)
        a = homology(q, "Z", check=False)
        b = homology(build_reduced_quotient(sig), "Z")
        assert nonzero(a) == nonzero(b), str(sig)


def test_norm_subcomplex_examples():
    q = build_norm_subcomplex_from_matching(7, Signature.parse("2-,2-,2-,1-"))
    assert nonzero(homology(q, "Z")) == {1: Zt(t3=1), 2: Zt(1)}
    q = build_norm_subcomplex_from_matching(5, Signature.parse("2+,2+,1+"))
    assert nonzero(homology(q, "Z~")) == {1: Zt(1)}
    q = build_norm_subcomplex_from_matching(6, Signature.parse("1+,1+,1+,1+,1+,1+"))
    assert same_complex(q, build_matching_complex(6))


def test_norm_subcomplex_checks_size():
    with pytest.raises(ValueError):
        build_norm_subcomplex_from_matching(6, Signature.parse("2+,2+"))


# -- wreath quotients ---------------------------------------------------------------------


def test_wreath_examples():
    sig = Signature.parse("1+,2-,2-,2-")
    q = build_wreath_quotient(sig, BlockPartition.validated([(1,), (2, 3, 4)], sig))
    h = homology(q, "Z")
    assert h[1] == Zt(t3=1) and h[2].is_zero()
    sig = Signature.parse("2+,3-,3-,3-,3-")
    q = build_wreath_quotient(sig, BlockPartition.validated([(1,), (2, 3, 4, 5)], sig))
    h = homology(q, "Z")
    assert q.ranks() == {4: 4, 5: 4, 6: 0}
    assert h[4] == HomologyGroup(0, ((5, 1, 1),)) and h[5].is_zero()


def test_wreath_with_singletons_is_reduced():
    sig = Signature.parse("2+,2-,2-,1-")
    q = build_wreath_quotient(sig, BlockPartition.singletons(4))
    assert same_complex(q, build_reduced_quotient(sig))


def test_positive_block_warns():
    sig = Signature.parse("2+,2+,1+")
    with pytest.warns(PositiveBlockWarning):
        build_wreath_quotient(sig, BlockPartition.validated([(1, 2), (3,)], sig))
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        sig = Signature.parse("2-,2-,1+")
        build_wreath_quotient(sig, BlockPartition.validated([(1, 2), (3,)], sig))


# -- Lie complex and phi ------------------------------------------------------------------


def test_lie_generator_example_and_sign():
    lie = build_lie_complex((2, 2, 2, 1))
    g = (((1, 2), (2, 3)), (1, 3, 4))
    assert g in lie.bases[2]
    assert lie_sign(g) == -1
    assert lie_sign((((1, 2), (3, 4)), (5,))) == 1


def test_lie_occupancy_invariant():
    lam = (1, 2, 2, 3)
    lie = build_lie_complex(lam)
    for k in lie.degrees:
        for es, vs in lie.bases[k]:
            assert len(es) == k
            assert 2 * len(es) + len(vs) == sum(lam)
            occ = [0] * (len(lam) + 1)
            for a in [x for ed in es for x in ed] + list(vs):
                occ[a] += 1
            assert occ[1:] == list(lam)
            assert len(set(es)) == len(es) and len(set(vs)) == len(vs)


def test_lie_two_points():
    lie = build_lie_complex((1, 1))
    assert lie.bases[1] == [(((1, 2),), ())]
    assert lie.bases[0] == [((), (1, 2))]
    assert lie.boundary(1).to_dense().tolist() in ([[1]], [[-1]])


def test_lie_three_torsion():
    h = homology(build_lie_complex((1, 2, 2, 2)), "Z")
    assert any(x.p_rank(3) for x in h.values())


@pytest.mark.parametrize("n", range(1, 10))
def test_phi_conjugates_boundaries(n):
    for lam in compositions(n):
        lie = build_lie_complex(lam)
        red = build_reduced_quotient(Signature.of(lam, [Charge.NEG] * len(lam)))
        phi = phi_map(lam, lie, red)
        assert verify_d_squared(lie)
        for k in lie.degrees:
            assert lie.rank(k) == red.rank(k - 1)
            col_counts = {}
            for (i, j), v in phi[k].entries.items():
                assert v in (1, -1)
                col_counts[j] = col_counts.get(j, 0) + 1
            assert len(col_counts) == lie.rank(k) and set(col_counts.values()) <= {1}
            if k - 1 in lie.bases:
                assert phi[k - 1] @ lie.boundary(k) == red.boundary(k - 1) @ phi[k], lam
