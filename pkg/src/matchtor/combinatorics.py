"""Vertices, charges, edges, multigraphs and the generator families.

Edges and loops on ``{1..r}`` are plain tuples ``(a, b)`` with ``a <= b``;
a multigraph is a sorted tuple of such edges.  Python tuple comparison is
exactly the lexicographic edge order used for orienting generators.
"""
from __future__ import annotations

import enum
import itertools
import re
from dataclasses import dataclass
from typing import Iterator, Sequence

Edge = tuple[int, int]
Multigraph = tuple[Edge, ...]
Matching = tuple[Edge, ...]


class Charge(enum.IntEnum):
    POS = 1
    NEG = -1

    def __neg__(self) -> "Charge":
        return Charge.NEG if self is Charge.POS else Charge.POS

    @property
    def symbol(self) -> str:
        return "+" if self is Charge.POS else "-"

    @classmethod
    def parse(cls, s: str) -> "Charge":
        if s == "+":
            return cls.POS
        if s == "-":
            return cls.NEG
        raise ValueError(f"bad charge {s!r}")


_PART_RE = re.compile(r"^\s*(\d+)\s*([+-])\s*$")


@dataclass(frozen=True)
class Signature:
    """Part sizes ``lambda_a`` together with charges ``s_a``."""

    parts: tuple[tuple[int, Charge], ...]

    def __post_init__(self):
        if not self.parts:
            raise ValueError("signature needs at least one part")
        parts = []
        for size, charge in self.parts:
            if int(size) < 1:
                raise ValueError(f"part sizes must be positive, got {size}")
            parts.append((int(size), Charge(charge)))
        object.__setattr__(self, "parts", tuple(parts))

    @classmethod
    def of(cls, sizes: Sequence[int], charges: Sequence[int] | str) -> "Signature":
        if isinstance(charges, str):
            charges = [Charge.parse(c) for c in charges]
        if len(sizes) != len(charges):
            raise ValueError("sizes and charges differ in length")
        return cls(tuple(zip(sizes, charges)))

    @classmethod
    def parse(cls, text: str) -> "Signature":
        parts = []
        for tok in text.split(","):
            m = _PART_RE.match(tok)
            if not m:
                raise ValueError(f"malformed signature token {tok!r}")
            parts.append((int(m.group(1)), Charge.parse(m.group(2))))
        return cls(tuple(parts))

    def __str__(self) -> str:
        return ",".join(f"{size}{c.symbol}" for size, c in self.parts)

    @property
    def r(self) -> int:
        return len(self.parts)

    @property
    def n(self) -> int:
        return sum(size for size, _ in self.parts)

    @property
    def sizes(self) -> tuple[int, ...]:
        return tuple(size for size, _ in self.parts)

    @property
    def charges(self) -> tuple[Charge, ...]:
        return tuple(c for _, c in self.parts)

    def size(self, a: int) -> int:
        return self.parts[a - 1][0]

    def charge(self, a: int) -> Charge:
        return self.parts[a - 1][1]

    def with_charges(self, charges: Sequence[int] | str) -> "Signature":
        return Signature.of(self.sizes, charges)

    @property
    def all_positive(self) -> bool:
        return all(c is Charge.POS for c in self.charges)


def edge(a: int, b: int) -> Edge:
    return (a, b) if a <= b else (b, a)


def lex_compare(e: Edge, f: Edge) -> int:
    """-1, 0 or 1 as ``e`` is less than, equal to or greater than ``f``."""
    return (e > f) - (e < f)


def commutes(e: Edge, f: Edge, sig: Signature) -> bool:
    """Two edges commute iff their (multiset) intersection holds exactly one
    negatively charged vertex.  Loops anticommute with everything."""
    if e[0] == e[1] or f[0] == f[1]:
        return False
    common = [a for a in e if a in f]
    neg = sum(1 for a in common if sig.charge(a) is Charge.NEG)
    return neg == 1


def degrees(g: Sequence[Edge], r: int) -> list[int]:
    deg = [0] * (r + 1)
    for a, b in g:
        deg[a] += 1
        deg[b] += 1
    return deg[1:]


def format_multigraph(g: Sequence[Edge]) -> str:
    return " ".join(f"{a}{b}" if max(a, b) < 10 else f"{a}.{b}" for a, b in g)


def parse_multigraph(text: str) -> Multigraph:
    out = []
    for tok in text.split():
        if "." in tok:
            a, b = tok.split(".")
        else:
            if len(tok) != 2:
                raise ValueError(f"bad edge token {tok!r}")
            a, b = tok[0], tok[1]
        out.append(edge(int(a), int(b)))
    return tuple(sorted(out))


# ---------------------------------------------------------------------------
# degree-window multigraph enumeration


def _edge_slots(r: int, loops_at: Sequence[bool]) -> list[Edge]:
    slots = []
    for a in range(1, r + 1):
        for b in range(a, r + 1):
            if a == b and not loops_at[a - 1]:
                continue
            slots.append((a, b))
    return slots


def _windowed_multigraphs(
    sig: Signature,
    lower: Sequence[int],
    upper: Sequence[int],
    loops_at: Sequence[bool],
    size: int | None,
) -> Iterator[Multigraph]:
    """Depth-first search over edge slots in lex order.

    Every slot gets a multiplicity; larger multiplicities are tried first so
    that for a fixed number of edges the output is lexicographically sorted.
    The degree of vertex ``a`` is final once all slots ``(a, *)`` have been
    decided, which is where the lower bound is checked.
    """
    r = sig.r
    slots = _edge_slots(r, loops_at)
    nslots = len(slots)
    # last slot index touching each vertex as its first coordinate
    block_end = {}
    for i, (a, _) in enumerate(slots):
        block_end[a] = i
    closes_at: dict[int, list[int]] = {}
    for a in range(1, r + 1):
        # vertices whose slots are all decided after slot i; a vertex with no
        # slot of its own (only possible if it is r with no loop) closes last
        i = block_end.get(a, nslots - 1)
        closes_at.setdefault(i, []).append(a)
    if nslots == 0:
        if all(lo <= 0 for lo in lower) and (size is None or size == 0):
            yield ()
        return

    maxmult = []
    for a, b in slots:
        if a == b:
            maxmult.append(1)
        elif sig.charge(a) != sig.charge(b):
            maxmult.append(min(upper[a - 1], upper[b - 1]))
        else:
            maxmult.append(1)

    deg = [0] * (r + 1)
    chosen: list[Edge] = []

    def rec(i: int):
        if size is not None and len(chosen) > size:
            return
        if i == nslots:
            if size is None or len(chosen) == size:
                yield tuple(chosen)
            return
        a, b = slots[i]
        if a == b:
            cap = min(maxmult[i], (upper[a - 1] - deg[a]) // 2)
        else:
            cap = min(maxmult[i], upper[a - 1] - deg[a], upper[b - 1] - deg[b])
        if size is not None:
            cap = min(cap, size - len(chosen))
        for m in range(cap, -1, -1):
            deg[a] += m
            deg[b] += m
            chosen.extend([(a, b)] * m)
            ok = True
            for v in closes_at.get(i, ()):
                if deg[v] < lower[v - 1]:
                    ok = False
                    break
            if ok:
                yield from rec(i + 1)
            del chosen[len(chosen) - m:]
            deg[a] -= m
            deg[b] -= m

    yield from rec(0)


def _reduced_window(sig: Signature):
    lower = [size - 1 for size in sig.sizes]
    upper = list(sig.sizes)
    loops = [False] * sig.r
    return lower, upper, loops


def _delta_window(sig: Signature):
    lower, upper, loops = [], [], []
    for size, c in sig.parts:
        if c is Charge.POS:
            lower.append(0)
            loops.append(True)
        else:
            lower.append(size - 1)
            loops.append(False)
        upper.append(size)
    return lower, upper, loops


def iter_reduced_generators(sig: Signature, size: int | None = None) -> Iterator[Multigraph]:
    """All multigraphs satisfying the reduced-complex conditions (any size)."""
    return _windowed_multigraphs(sig, *_reduced_window(sig), size)


def iter_delta_generators(sig: Signature, size: int | None = None) -> Iterator[Multigraph]:
    return _windowed_multigraphs(sig, *_delta_window(sig), size)


def enumerate_reduced_generators(sig: Signature, d: int) -> list[Multigraph]:
    """Loopless multigraphs with ``d+1`` edges, ``lambda_a - 1 <= deg(a) <= lambda_a``
    and repeated edges only between opposite charges; sorted."""
    if d < -1:
        return []
    return list(iter_reduced_generators(sig, d + 1))


def enumerate_delta_generators(sig: Signature, d: int) -> list[Multigraph]:
    if d < -1:
        return []
    return list(iter_delta_generators(sig, d + 1))


def is_reduced_generator(g: Sequence[Edge], sig: Signature) -> bool:
    deg = degrees(g, sig.r)
    for a, (size, _) in enumerate(sig.parts, start=1):
        if not size - 1 <= deg[a - 1] <= size:
            return False
    return _multiplicities_ok(g, sig, loops_allowed=False)


def is_delta_generator(g: Sequence[Edge], sig: Signature) -> bool:
    deg = degrees(g, sig.r)
    for a, (size, c) in enumerate(sig.parts, start=1):
        lo = 0 if c is Charge.POS else size - 1
        if not lo <= deg[a - 1] <= size:
            return False
    for a, b in g:
        if a == b and sig.charge(a) is Charge.NEG:
            return False
    return _multiplicities_ok(g, sig, loops_allowed=True)


def _multiplicities_ok(g: Sequence[Edge], sig: Signature, loops_allowed: bool) -> bool:
    for e, grp in itertools.groupby(sorted(g)):
        m = len(list(grp))
        a, b = e
        if a == b:
            if not loops_allowed or m > 1:
                return False
        elif m > 1 and sig.charge(a) == sig.charge(b):
            return False
    return True


# ---------------------------------------------------------------------------
# matchings


def complete_graph_edges(n: int) -> list[Edge]:
    return [(a, b) for a in range(1, n + 1) for b in range(a + 1, n + 1)]


def iter_matchings(n: int, size: int | None = None) -> Iterator[Matching]:
    """Matchings on ``{1..n}`` as sorted edge tuples, in lex order per size."""
    edges = complete_graph_edges(n)
    used = [False] * (n + 1)
    chosen: list[Edge] = []

    def rec(start: int):
        if size is None or len(chosen) == size:
            yield tuple(chosen)
            if size is not None:
                return
        for i in range(start, len(edges)):
            a, b = edges[i]
            if used[a] or used[b]:
                continue
            used[a] = used[b] = True
            chosen.append((a, b))
            yield from rec(i + 1)
            chosen.pop()
            used[a] = used[b] = False

    yield from rec(0)


def enumerate_matchings(n: int, d: int) -> list[Matching]:
    """Matchings with ``d+1`` pairs; ``d = -1`` gives the empty matching."""
    if d < -1 or 2 * (d + 1) > n:
        return []
    return list(iter_matchings(n, d + 1))


# ---------------------------------------------------------------------------
# block partitions


@dataclass(frozen=True)
class BlockPartition:
    blocks: tuple[tuple[int, ...], ...]

    @classmethod
    def validated(cls, blocks: Sequence[Sequence[int]], sig: Signature) -> "BlockPartition":
        seen: set[int] = set()
        norm = []
        for blk in blocks:
            if not blk:
                raise ValueError("empty block")
            for a in blk:
                if not 1 <= a <= sig.r:
                    raise ValueError(f"vertex {a} outside 1..{sig.r}")
                if a in seen:
                    raise ValueError(f"vertex {a} appears in two blocks")
                seen.add(a)
            first = sig.parts[blk[0] - 1]
            for a in blk:
                if sig.parts[a - 1] != first:
                    other = sig.parts[a - 1]
                    raise ValueError(f"block {tuple(blk)} mixes parts {first[0]}{first[1].symbol} "
                                     f"and {other[0]}{other[1].symbol}")
            norm.append(tuple(sorted(blk)))
        missing = set(range(1, sig.r + 1)) - seen
        if missing:
            raise ValueError(f"vertices {sorted(missing)} not covered by blocks")
        return cls(tuple(norm))

    @classmethod
    def singletons(cls, r: int) -> "BlockPartition":
        return cls(tuple((a,) for a in range(1, r + 1)))

    def __str__(self) -> str:
        return "".join("{" + ",".join(map(str, b)) + "}" for b in self.blocks)

    @property
    def mu(self) -> tuple[int, ...]:
        return tuple(len(b) for b in self.blocks)
