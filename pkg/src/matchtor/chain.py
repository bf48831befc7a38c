"""Chain complexes over the integers with multiset generators.

A generator of degree ``d`` is a sorted tuple of ``d+1`` symbols.  Symbols
carry a commutation relation; swapping two adjacent anticommuting symbols
negates a generator, swapping commuting ones does not.  With the relation
that nothing commutes this is ordinary simplicial orientation.
"""
from __future__ import annotations

import logging
from collections import deque
from dataclasses import dataclass, field
from typing import Any, Callable, Hashable, Iterable, Sequence

import numpy as np

log = logging.getLogger(__name__)

Label = tuple
CommutationOracle = Callable[[Any, Any], bool]

DEFAULT_GROUP_CAP = 10**6


class BudgetExceeded(RuntimeError):
    """A job grew beyond the configured size caps."""


def never_commute(x, y) -> bool:
    return False


class SparseIntMatrix:
    """Integer matrix stored as ``{(row, col): value}`` without zeros."""

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, rows: int, cols: int, entries: dict[tuple[int, int], int] | None = None):
        self.rows = rows
        self.cols = cols
        self.entries: dict[tuple[int, int], int] = {}
        if entries:
            for (i, j), v in entries.items():
                if not (0 <= i < rows and 0 <= j < cols):
                    raise IndexError(f"entry {(i, j)} outside {rows}x{cols}")
                if v:
                    self.entries[i, j] = int(v)

    @classmethod
    def from_dense(cls, a) -> "SparseIntMatrix":
        a = np.asarray(a, dtype=object)
        if a.ndim != 2:
            a = a.reshape(len(a), -1)
        m = cls(a.shape[0], a.shape[1])
        for (i, j), v in np.ndenumerate(a):
            if v:
                m.entries[i, j] = int(v)
        return m

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    @property
    def nnz(self) -> int:
        return len(self.entries)

    def __getitem__(self, ij) -> int:
        return self.entries.get(ij, 0)

    def __eq__(self, other) -> bool:
        if not isinstance(other, SparseIntMatrix):
            return NotImplemented
        return self.shape == other.shape and self.entries == other.entries

    def __repr__(self) -> str:
        return f"SparseIntMatrix({self.rows}x{self.cols}, nnz={self.nnz})"

    def copy(self) -> "SparseIntMatrix":
        m = SparseIntMatrix(self.rows, self.cols)
        m.entries = dict(self.entries)
        return m

    def to_dense(self) -> np.ndarray:
        a = np.zeros((self.rows, self.cols), dtype=object)
        for (i, j), v in self.entries.items():
            a[i, j] = v
        return a

    def row_dicts(self) -> list[dict[int, int]]:
        rows: list[dict[int, int]] = [dict() for _ in range(self.rows)]
        for (i, j), v in self.entries.items():
            rows[i][j] = v
        return rows

    def col_dicts(self) -> list[dict[int, int]]:
        cols: list[dict[int, int]] = [dict() for _ in range(self.cols)]
        for (i, j), v in self.entries.items():
            cols[j][i] = v
        return cols

    def transpose(self) -> "SparseIntMatrix":
        m = SparseIntMatrix(self.cols, self.rows)
        m.entries = {(j, i): v for (i, j), v in self.entries.items()}
        return m

    def __matmul__(self, other: "SparseIntMatrix") -> "SparseIntMatrix":
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        left_rows_by_col: dict[int, list[tuple[int, int]]] = {}
        for (i, k), v in self.entries.items():
            left_rows_by_col.setdefault(k, []).append((i, v))
        out: dict[tuple[int, int], int] = {}
        for (k, j), w in other.entries.items():
            for i, v in left_rows_by_col.get(k, ()):
                out[i, j] = out.get((i, j), 0) + v * w
        return SparseIntMatrix(self.rows, other.cols, out)

    def is_zero(self) -> bool:
        return not self.entries


def reorder_sign(seq: Sequence, commutes: CommutationOracle = never_commute) -> int:
    """``(-1)**eta`` with eta the number of anticommuting inversions of ``seq``."""
    eta = 0
    n = len(seq)
    for i in range(n):
        x = seq[i]
        for j in range(i + 1, n):
            y = seq[j]
            if x > y and not commutes(x, y):
                eta += 1
    return -1 if eta & 1 else 1


def boundary_of_generator(
    g: Label,
    commutes: CommutationOracle = never_commute,
    member: Callable[[Label], bool] | None = None,
) -> dict[Label, int]:
    """Formal boundary of a sorted generator.

    The face dropping ``g[i]`` gets sign ``(-1)**(d - eta_i)`` where ``eta_i``
    counts later members anticommuting with ``g[i]``.  Faces rejected by
    ``member`` vanish.  Repeated symbols produce the same face twice, and the
    two contributions add.
    """
    d = len(g) - 1
    out: dict[Label, int] = {}
    for i in range(d + 1):
        x = g[i]
        eta = 0
        for j in range(i + 1, d + 1):
            if not commutes(x, g[j]):
                eta += 1
        face = g[:i] + g[i + 1:]
        if member is not None and not member(face):
            continue
        s = -1 if (d - eta) & 1 else 1
        out[face] = out.get(face, 0) + s
    return {f: c for f, c in out.items() if c}


@dataclass
class ChainComplex:
    """Graded free abelian groups with integer boundary matrices.

    ``boundaries[d]`` maps ``C_d -> C_{d-1}``; its entry ``(row, col)`` is
    the coefficient of ``bases[d-1][row]`` in the boundary of
    ``bases[d][col]``.  ``canonical`` is only set for quotient complexes: it
    sends every generator of the parent complex to ``(label, sign)`` in this
    complex, or ``(None, 0)`` for generators that vanish.
    """

    bases: dict[int, list]
    boundaries: dict[int, SparseIntMatrix]
    commutes: CommutationOracle = never_commute
    name: str = ""
    label_format: Callable[[Any], str] = str
    canonical: dict | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.bases:
            self.bases = {0: []}
        lo, hi = min(self.bases), max(self.bases)
        for d in range(lo, hi + 1):
            self.bases.setdefault(d, [])
        for d in range(lo, hi + 1):
            rows = len(self.bases.get(d - 1, ()))
            cols = len(self.bases[d])
            m = self.boundaries.get(d)
            if m is None:
                self.boundaries[d] = SparseIntMatrix(rows, cols)
            elif m.shape != (rows, cols):
                raise ValueError(f"boundary {d} has shape {m.shape}, expected {(rows, cols)}")
        self._index: dict[int, dict] = {}

    @property
    def d_min(self) -> int:
        return min(self.bases)

    @property
    def d_max(self) -> int:
        return max(self.bases)

    @property
    def degrees(self) -> range:
        return range(self.d_min, self.d_max + 1)

    def rank(self, d: int) -> int:
        return len(self.bases.get(d, ()))

    def ranks(self) -> dict[int, int]:
        return {d: self.rank(d) for d in self.degrees}

    def boundary(self, d: int) -> SparseIntMatrix:
        if d in self.boundaries:
            return self.boundaries[d]
        return SparseIntMatrix(self.rank(d - 1), self.rank(d))

    def index(self, d: int) -> dict:
        if d not in self._index:
            self._index[d] = {g: i for i, g in enumerate(self.bases.get(d, ()))}
        return self._index[d]

    def euler_characteristic(self) -> int:
        return sum((-1) ** (d % 2) * self.rank(d) for d in self.degrees)

    def trimmed(self) -> "ChainComplex":
        """Drop empty degrees at either end."""
        nonempty = [d for d in self.degrees if self.rank(d)]
        if not nonempty:
            return self
        lo, hi = min(nonempty), max(nonempty)
        bases = {d: self.bases[d] for d in range(lo, hi + 1)}
        bnd = {d: self.boundaries[d] for d in range(lo + 1, hi + 1)}
        bnd[lo] = SparseIntMatrix(0, self.rank(lo))
        return ChainComplex(bases, bnd, self.commutes, self.name, self.label_format,
                            self.canonical, dict(self.meta))


def complex_from_generators(
    generators: dict[int, list],
    commutes: CommutationOracle = never_commute,
    member: Callable[[Label], bool] | None = None,
    name: str = "",
    label_format: Callable[[Any], str] = str,
) -> ChainComplex:
    """Assemble a complex whose boundary is the signed face map.

    Faces not in the generator family are dropped; by default membership is
    looked up in the family itself.
    """
    index = {d: {g: i for i, g in enumerate(gens)} for d, gens in generators.items()}
    if member is None:
        def member(face, _idx=index):
            return face in _idx.get(len(face) - 1, ())
    bnd = {}
    for d, gens in generators.items():
        below = index.get(d - 1)
        rows = len(generators.get(d - 1, ()))
        m = SparseIntMatrix(rows, len(gens))
        if below is not None:
            ent = m.entries
            for j, g in enumerate(gens):
                for face, c in boundary_of_generator(g, commutes, member).items():
                    i = below.get(face)
                    if i is not None:
                        ent[i, j] = c
        bnd[d] = m
    return ChainComplex(dict(generators), bnd, commutes, name, label_format)


def verify_d_squared(cx: ChainComplex) -> bool:
    for d in cx.degrees:
        if d - 1 not in cx.bases:
            continue
        if not (cx.boundary(d - 1) @ cx.boundary(d)).is_zero():
            return False
    return True


# ---------------------------------------------------------------------------
# groups


Perm = tuple[int, ...]


def compose(g: Perm, h: Perm) -> Perm:
    """``g after h`` for permutations of ``{1..m}`` stored as ``p[i-1] = p(i)``."""
    return tuple(g[x - 1] for x in h)


def inverse(g: Perm) -> Perm:
    out = [0] * len(g)
    for i, x in enumerate(g, start=1):
        out[x - 1] = i
    return tuple(out)


def identity_perm(m: int) -> Perm:
    return tuple(range(1, m + 1))


def perm_sign(g: Perm) -> int:
    seen = [False] * len(g)
    s = 1
    for i in range(len(g)):
        if seen[i]:
            continue
        j, length = i, 0
        while not seen[j]:
            seen[j] = True
            j = g[j] - 1
            length += 1
        if length % 2 == 0:
            s = -s
    return s


def transposition(m: int, a: int, b: int) -> Perm:
    p = list(range(1, m + 1))
    p[a - 1], p[b - 1] = b, a
    return tuple(p)


def group_closure(
    generators: Sequence[Perm],
    degree: int | None = None,
    cap: int = DEFAULT_GROUP_CAP,
    characters: Sequence[int] | None = None,
) -> list[Perm] | tuple[list[Perm], dict[Perm, int]]:
    """Breadth-first closure of ``generators`` (identity first).

    With ``characters`` (one sign per generator) the signs are extended
    multiplicatively and a ``{element: sign}`` map is returned as well; a
    ValueError is raised if the assignment is not a homomorphism.
    """
    if degree is None:
        if not generators:
            raise ValueError("degree required for an empty generator list")
        degree = len(generators[0])
    e = identity_perm(degree)
    chars = list(characters) if characters is not None else [1] * len(generators)
    sign = {e: 1}
    order = [e]
    queue = deque([e])
    while queue:
        g = queue.popleft()
        for s, cs in zip(generators, chars):
            h = compose(s, g)
            c = cs * sign[g]
            old = sign.get(h)
            if old is None:
                if len(order) >= cap:
                    raise BudgetExceeded(f"group exceeds {cap} elements")
                sign[h] = c
                order.append(h)
                queue.append(h)
            elif old != c:
                raise ValueError("sign assignment is not a homomorphism")
    if characters is None:
        return order
    return order, sign


def relabel_edge(g: Perm, e):
    a, b = g[e[0] - 1], g[e[1] - 1]
    return (a, b) if a <= b else (b, a)


@dataclass
class GroupAction:
    """A permutation group on vertices ``{1..m}`` acting on edge symbols,
    twisted by an external sign character."""

    elements: list[Perm]
    character: dict[Perm, int]
    degree: int
    relabel: Callable[[Perm, Any], Any] = relabel_edge
    generators: tuple[Perm, ...] = ()

    @classmethod
    def generated_by(
        cls,
        degree: int,
        generators: Sequence[Perm],
        characters: Sequence[int] | None = None,
        cap: int = DEFAULT_GROUP_CAP,
        relabel: Callable[[Perm, Any], Any] = relabel_edge,
    ) -> "GroupAction":
        chars = list(characters) if characters is not None else [1] * len(generators)
        elements, char = group_closure(generators, degree, cap, chars)
        return cls(elements, char, degree, relabel, tuple(generators))

    @classmethod
    def trivial(cls, degree: int) -> "GroupAction":
        return cls.generated_by(degree, [])

    @property
    def order(self) -> int:
        return len(self.elements)

    def act(self, g: Perm, label: Label, commutes: CommutationOracle = never_commute) -> tuple[Label, int]:
        seq = [self.relabel(g, x) for x in label]
        s = self.character[g] * reorder_sign(seq, commutes)
        return tuple(sorted(seq)), s


def young_action(blocks: Sequence[Sequence[int]], negative: Sequence[bool], degree: int,
                 cap: int = DEFAULT_GROUP_CAP) -> GroupAction:
    """Product of symmetric groups on ``blocks``; blocks flagged negative
    contribute the sign of their permutation to the character."""
    gens, chars = [], []
    for blk, neg in zip(blocks, negative):
        blk = sorted(blk)
        for a, b in zip(blk, blk[1:]):
            gens.append(transposition(degree, a, b))
            chars.append(-1 if neg else 1)
    return GroupAction.generated_by(degree, gens, chars, cap)


def act_on_generator(action: GroupAction, element: Perm, g: Label,
                     commutes: CommutationOracle = never_commute) -> tuple[Label, int]:
    return action.act(element, g, commutes)


@dataclass
class _Orbit:
    rep: Any
    members: dict  # label -> sign relative to rep
    zero: bool


def classify_orbits(labels: Iterable[Label], action: GroupAction,
                    commutes: CommutationOracle,
                    canonical: Callable[[Label], tuple[Any, int]] | None = None) -> dict:
    """Map every label to ``(rep, sign)`` or ``(None, 0)`` for zero orbits.

    Labels are visited in sorted order, so the first member of each orbit
    seen is its lexicographically smallest element.  An orbit vanishes iff
    some group element sends a member to itself with sign -1, which shows up
    as one label reached with two different signs.
    """
    out: dict = {}
    for lab in sorted(labels):
        if lab in out:
            continue
        members: dict = {}
        zero = False
        for g in action.elements:
            img, s = action.act(g, lab, commutes)
            if canonical is not None:
                img, s2 = canonical(img)
                if img is None:
                    zero = True
                    continue
                s *= s2
            old = members.get(img)
            if old is None:
                members[img] = s
            elif old != s:
                zero = True
        for m, s in members.items():
            out[m] = (None, 0) if zero else (lab, s)
        if lab not in members:
            out[lab] = (None, 0)
    return out


def norm_quotient(cx: ChainComplex, action: GroupAction, name: str = "") -> ChainComplex:
    """Subcomplex of orbit sums ``[c] = sum_g g.c`` in the basis of orbit
    representatives.

    If ``cx`` is itself a quotient (has ``canonical``), the action must
    commute with the group already divided out; images are then pushed
    through the existing canonical map.
    """
    parent_canon = None
    if cx.canonical is not None:
        pc = cx.canonical

        def parent_canon(lab, _pc=pc):
            return _pc.get(lab, (None, 0))

    classes: dict[int, dict] = {}
    bases: dict[int, list] = {}
    for d in cx.degrees:
        cl = classify_orbits(cx.bases[d], action, cx.commutes, parent_canon)
        classes[d] = cl
        bases[d] = sorted({rep for rep, s in cl.values() if rep is not None})

    old_index = {d: cx.index(d) for d in cx.degrees}
    new_index = {d: {g: i for i, g in enumerate(bases[d])} for d in cx.degrees}
    bnd = {}
    for d in cx.degrees:
        rows = len(bases.get(d - 1, ()))
        m = SparseIntMatrix(rows, len(bases[d]))
        if d - 1 in bases:
            cols_old = cx.boundary(d).col_dicts()
            old_rows = cx.bases[d - 1]
            cl_below = classes[d - 1]
            for j, rep in enumerate(bases[d]):
                col = cols_old[old_index[d][rep]]
                acc: dict[int, int] = {}
                for i_old, c in col.items():
                    r, s = cl_below[old_rows[i_old]]
                    if r is None:
                        continue
                    i = new_index[d - 1][r]
                    acc[i] = acc.get(i, 0) + c * s
                for i, v in acc.items():
                    if v:
                        m.entries[i, j] = v
        bnd[d] = m

    canon: dict = {}
    for d in cx.degrees:
        for lab, (rep, s) in classes[d].items():
            canon[lab] = (rep, s)
    if cx.canonical is not None:
        # compose: original label -> parent rep -> our rep
        for lab, (prep, s) in cx.canonical.items():
            if prep is None:
                canon[lab] = (None, 0)
            else:
                rep, s2 = canon.get(prep, (None, 0))
                canon[lab] = (rep, s * s2) if rep is not None else (None, 0)
    q = ChainComplex(bases, bnd, cx.commutes, name or f"{cx.name}/G", cx.label_format, canon,
                     dict(cx.meta, group_order=cx.meta.get("group_order", 1) * action.order))
    return q


# ---------------------------------------------------------------------------
# file format


class FormatError(ValueError):
    pass


def write_chaincomplex(cx: ChainComplex, fh, labels: bool = True) -> None:
    fh.write("CHAINCOMPLEX v1\n")
    fh.write(f"degrees {cx.d_min} {cx.d_max}\n")
    for d in cx.degrees:
        basis = cx.bases[d]
        fh.write(f"basis {d} {len(basis)}\n")
        if labels:
            for i, g in enumerate(basis):
                fh.write(f"label {d} {i} {cx.label_format(g)}\n")
    for d in cx.degrees:
        m = cx.boundary(d)
        for (i, j), v in sorted(m.entries.items(), key=lambda t: (t[0][1], t[0][0])):
            fh.write(f"entry {d} {i} {j} {v}\n")


def read_chaincomplex(fh) -> ChainComplex:
    lines = iter(fh)
    head = next(lines, "").strip()
    if head != "CHAINCOMPLEX v1":
        raise FormatError(f"bad header {head!r}")
    tok = next(lines, "").split()
    if len(tok) != 3 or tok[0] != "degrees":
        raise FormatError("expected 'degrees <min> <max>'")
    lo, hi = int(tok[1]), int(tok[2])
    counts: dict[int, int] = {}
    labels: dict[int, dict[int, str]] = {}
    entries: dict[int, dict] = {d: {} for d in range(lo, hi + 1)}
    for ln, line in enumerate(lines, start=3):
        line = line.rstrip("\n")
        if not line.strip():
            continue
        kind, _, rest = line.partition(" ")
        if kind == "basis":
            d, c = map(int, rest.split())
            counts[d] = c
        elif kind == "label":
            d, i, text = rest.split(" ", 2)
            labels.setdefault(int(d), {})[int(i)] = text
        elif kind == "entry":
            d, i, j, v = rest.split()
            entries[int(d)][int(i), int(j)] = int(v)
        else:
            raise FormatError(f"line {ln}: unknown record {kind!r}")
    bases = {}
    for d in range(lo, hi + 1):
        c = counts.get(d, 0)
        lab = labels.get(d, {})
        bases[d] = [lab.get(i, f"g{d}_{i}") for i in range(c)]
    bnd = {}
    for d in range(lo, hi + 1):
        rows = len(bases.get(d - 1, ()))
        bnd[d] = SparseIntMatrix(rows, len(bases[d]), entries[d])
    return ChainComplex(bases, bnd, name="imported")


def same_complex(a: ChainComplex, b: ChainComplex) -> bool:
    """Equal degree range, basis sizes, and boundary matrices."""
    if (a.d_min, a.d_max) != (b.d_min, b.d_max):
        return False
    return all(a.rank(d) == b.rank(d) and a.boundary(d) == b.boundary(d) for d in a.degrees)
