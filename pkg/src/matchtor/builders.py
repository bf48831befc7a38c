"""Constructors for the matching complex and its equivariant relatives."""
from __future__ import annotations

import logging
import warnings
from collections import defaultdict
from functools import lru_cache
from math import factorial, prod
from typing import Sequence

from .chain import (
    DEFAULT_GROUP_CAP,
    BudgetExceeded,
    ChainComplex,
    GroupAction,
    SparseIntMatrix,
    complex_from_generators,
    never_commute,
    norm_quotient,
    transposition,
    young_action,
)
from .combinatorics import (
    BlockPartition,
    Charge,
    Signature,
    commutes,
    complete_graph_edges,
    format_multigraph,
    iter_delta_generators,
    iter_matchings,
    iter_reduced_generators,
)

log = logging.getLogger(__name__)

DEFAULT_GENERATOR_CAP = 10**6


class PositiveBlockWarning(UserWarning):
    """A block of size >= 2 is positively charged; the wreath quotient may
    then differ from the matching-complex quotient by small torsion."""


def _commutation_oracle(sig: Signature):
    @lru_cache(maxsize=None)
    def oracle(e, f):
        return commutes(e, f, sig)
    return oracle


def _group_by_degree(gens, cap: int) -> dict[int, list]:
    by: dict[int, list] = defaultdict(list)
    for g in gens:
        bucket = by[len(g) - 1]
        bucket.append(g)
        if len(bucket) > cap:
            raise BudgetExceeded(f"more than {cap} generators in degree {len(g) - 1}")
    if not by:
        return {0: []}
    lo, hi = min(by), max(by)
    return {d: sorted(by.get(d, [])) for d in range(lo, hi + 1)}


def build_matching_complex(n: int, cap: int = DEFAULT_GENERATOR_CAP) -> ChainComplex:
    """Reduced simplicial chain complex of matchings on ``{1..n}``; the empty
    matching sits in degree -1."""
    if n < 1:
        raise ValueError("n must be positive")
    gens = _group_by_degree(iter_matchings(n), cap)
    cx = complex_from_generators(gens, never_commute, name=f"M_{n}", label_format=format_multigraph)
    cx.meta.update(kind="matching", n=n)
    return cx


def _bd_faces(sig: Signature):
    """Sets of edges and loops with ``deg(a) <= lambda_a``, by plain subset
    search over the vertex alphabet (independent of the multigraph DFS)."""
    r = sig.r
    alphabet = [(a, b) for a in range(1, r + 1) for b in range(a, r + 1)]
    cap = list(sig.sizes)
    deg = [0] * (r + 1)
    chosen = []

    def rec(i):
        yield tuple(chosen)
        for k in range(i, len(alphabet)):
            a, b = alphabet[k]
            deg[a] += 1
            deg[b] += 1
            if deg[a] <= cap[a - 1] and deg[b] <= cap[b - 1]:
                chosen.append((a, b))
                yield from rec(k + 1)
                chosen.pop()
            deg[a] -= 1
            deg[b] -= 1

    yield from rec(0)


def build_bd_complex(sig: Signature, cap: int = DEFAULT_GENERATOR_CAP) -> ChainComplex:
    if not sig.all_positive:
        raise ValueError("BD complexes need an all-positive signature")
    gens = _group_by_degree(_bd_faces(sig), cap)
    cx = complex_from_generators(gens, never_commute, name=f"BD({sig})", label_format=format_multigraph)
    cx.meta.update(kind="bd", sig=str(sig))
    return cx


def build_delta_quotient(sig: Signature, cap: int = DEFAULT_GENERATOR_CAP) -> ChainComplex:
    """The full multigraph family with loops allowed at positive vertices."""
    gens = _group_by_degree(iter_delta_generators(sig), cap)
    cx = complex_from_generators(gens, _commutation_oracle(sig), name=f"Delta({sig})",
                                 label_format=format_multigraph)
    cx.meta.update(kind="delta", sig=str(sig), group_order=young_order(sig))
    return cx


def build_reduced_quotient(sig: Signature, cap: int = DEFAULT_GENERATOR_CAP) -> ChainComplex:
    """Multigraphs with every degree in ``[lambda_a - 1, lambda_a]``, no loops,
    repeated edges only across opposite charges."""
    gens = _group_by_degree(iter_reduced_generators(sig), cap)
    cx = complex_from_generators(gens, _commutation_oracle(sig), name=f"C({sig})",
                                 label_format=format_multigraph)
    cx.meta.update(kind="reduced", sig=str(sig), group_order=young_order(sig))
    return cx


def block_action(blocks: BlockPartition, r: int, cap: int = DEFAULT_GROUP_CAP) -> GroupAction:
    """Unsigned action of the product of symmetric groups on the blocks."""
    gens = []
    for blk in blocks.blocks:
        for a, b in zip(blk, blk[1:]):
            gens.append(transposition(r, a, b))
    return GroupAction.generated_by(r, gens, None, cap)


def build_wreath_quotient(sig: Signature, blocks: BlockPartition,
                          cap: int = DEFAULT_GENERATOR_CAP,
                          group_cap: int = DEFAULT_GROUP_CAP) -> ChainComplex:
    for blk in blocks.blocks:
        if len(blk) >= 2 and sig.charge(blk[0]) is Charge.POS:
            warnings.warn(f"block {blk} is positively charged; homology may pick up "
                          "torsion of order dividing the block group", PositiveBlockWarning)
    base = build_reduced_quotient(sig, cap)
    action = block_action(blocks, sig.r, group_cap)
    q = norm_quotient(base, action, name=f"C({sig})/S{blocks}")
    q.meta.update(kind="wreath", sig=str(sig), blocks=str(blocks))
    return q


def young_order(sig: Signature) -> int:
    return prod(factorial(s) for s in sig.sizes)


def consecutive_blocks(sizes: Sequence[int]) -> list[tuple[int, ...]]:
    out, start = [], 1
    for s in sizes:
        out.append(tuple(range(start, start + s)))
        start += s
    return out


def build_norm_subcomplex_from_matching(n: int, sig: Signature,
                                        cap: int = DEFAULT_GENERATOR_CAP,
                                        group_cap: int = DEFAULT_GROUP_CAP) -> ChainComplex:
    """Orbit-sum subcomplex of ``M_n`` under the signed Young action, with the
    parts placed on consecutive integer blocks."""
    if sig.n != n:
        raise ValueError(f"signature sums to {sig.n}, not {n}")
    blocks = consecutive_blocks(sig.sizes)
    action = young_action(blocks, [c is Charge.NEG for c in sig.charges], n, group_cap)
    q = norm_quotient(build_matching_complex(n, cap), action, name=f"M_{n}/({sig})")
    q.meta.update(kind="norm-subcomplex", sig=str(sig), n=n, group_order=action.order)
    return q


# ---------------------------------------------------------------------------
# two-step nilpotent Lie complex


def _inversions(seq: Sequence[int]) -> int:
    return sum(1 for i in range(len(seq)) for j in range(i + 1, len(seq)) if seq[i] > seq[j])


def _lie_generators(sizes: Sequence[int]):
    """Pairs (edges, vertices): distinct loopless edges and distinct
    vertices with every ``a`` occurring exactly ``lambda_a`` times."""
    r = len(sizes)
    edges = complete_graph_edges(r)
    for mask in range(1 << r):
        verts = tuple(a for a in range(1, r + 1) if mask >> (a - 1) & 1)
        need = [0] + [sizes[a - 1] - (1 if a in verts else 0) for a in range(1, r + 1)]
        if min(need[1:]) < 0 or sum(need) % 2:
            continue
        chosen = []

        def rec(i):
            if i == len(edges) or all(x == 0 for x in need[1:]):
                if all(x == 0 for x in need[1:]):
                    yield tuple(chosen)
                return
            a, b = edges[i]
            # vertex a is finished once the last edge (a, r) is decided
            if need[a] > 0 and need[b] > 0:
                need[a] -= 1
                need[b] -= 1
                chosen.append((a, b))
                yield from rec(i + 1)
                chosen.pop()
                need[a] += 1
                need[b] += 1
            if b == r and need[a] > 0:
                return
            yield from rec(i + 1)

        for es in rec(0):
            yield es, verts


def format_lie(g) -> str:
    es, vs = g
    return "^".join(f"{a}{b}" for a, b in es) + "|" + "^".join(map(str, vs))


def build_lie_complex(sizes: Sequence[int], cap: int = DEFAULT_GENERATOR_CAP) -> ChainComplex:
    """Koszul-type complex with generators ``e_0^...^e_d (x) v_1^...^v_t``.

    The chain degree is the number of edges, so ``X_{d+1}`` sits in degree
    ``d+1`` and pairs with degree ``d`` of the all-negative reduced complex.
    """
    sizes = tuple(int(s) for s in sizes)
    if not sizes or min(sizes) < 1:
        raise ValueError("part sizes must be positive")
    by: dict[int, list] = defaultdict(list)
    for es, vs in _lie_generators(sizes):
        bucket = by[len(es)]
        bucket.append((es, vs))
        if len(bucket) > cap:
            raise BudgetExceeded(f"more than {cap} generators in degree {len(es)}")
    if not by:
        return ChainComplex({0: []}, {}, name=f"X{sizes}")
    lo, hi = min(by), max(by)
    bases = {k: sorted(by.get(k, [])) for k in range(lo, hi + 1)}
    index = {k: {g: i for i, g in enumerate(b)} for k, b in bases.items()}
    bnd = {}
    for k in range(lo, hi + 1):
        m = SparseIntMatrix(len(bases.get(k - 1, ())), len(bases[k]))
        if k - 1 in bases:
            for j, (es, vs) in enumerate(bases[k]):
                for i, (x, y) in enumerate(es):
                    newv = (x, y) + vs
                    if len(set(newv)) < len(newv):
                        continue
                    s = -1 if (i + _inversions(newv)) & 1 else 1
                    face = (es[:i] + es[i + 1:], tuple(sorted(newv)))
                    row = index[k - 1].get(face)
                    if row is None:
                        continue
                    m.entries[row, j] = m.entries.get((row, j), 0) + s
        bnd[k] = m
    cx = ChainComplex(bases, bnd, name=f"X{sizes}", label_format=format_lie)
    cx.meta.update(kind="lie", sizes=list(sizes))
    return cx


def lie_sign(g) -> int:
    """``(-1)**inv`` of the flattened sequence ``(x_0, y_0, ..., v_1, ...)``."""
    es, vs = g
    flat = [x for e in es for x in e] + list(vs)
    return -1 if _inversions(flat) & 1 else 1


def phi_map(sizes: Sequence[int], lie: ChainComplex | None = None,
            reduced: ChainComplex | None = None) -> dict[int, SparseIntMatrix]:
    """Signed bijections ``X_{d+1} -> C_d`` as matrices indexed by the Lie
    degree ``d+1`` (rows: reduced-complex basis, columns: Lie basis)."""
    sizes = tuple(sizes)
    if lie is None:
        lie = build_lie_complex(sizes)
    if reduced is None:
        reduced = build_reduced_quotient(Signature.of(sizes, [Charge.NEG] * len(sizes)))
    out = {}
    for k in lie.degrees:
        target = reduced.index(k - 1)
        m = SparseIntMatrix(reduced.rank(k - 1), lie.rank(k))
        for j, g in enumerate(lie.bases[k]):
            i = target.get(g[0])
            if i is None:
                raise ValueError(f"Lie generator {format_lie(g)} has no image")
            m.entries[i, j] = lie_sign(g)
        out[k] = m
    return out
