"""Homology over Z, Q, GF(p) and Z[1/2], plus universal-coefficient bookkeeping."""
from __future__ import annotations

import logging
import time
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from math import gcd
from typing import Iterable, Sequence

from sympy import factorint, isprime

from . import elimination
from .chain import ChainComplex, SparseIntMatrix, verify_d_squared

log = logging.getLogger(__name__)

DEFAULT_PRIMES = (3, 5, 7, 11, 13)


class InvariantError(RuntimeError):
    """A computed quantity contradicts an identity that must hold (d^2 = 0,
    universal coefficients, ...)."""


# ---------------------------------------------------------------------------
# rings


@dataclass(frozen=True)
class RingSpec:
    kind: str               # "Z", "Q", "Zp" or "Z~"
    p: int | None = None

    def __post_init__(self):
        if self.kind not in ("Z", "Q", "Zp", "Z~"):
            raise ValueError(f"unknown ring {self.kind!r}")
        if self.kind == "Zp":
            if self.p is None or not isprime(self.p):
                raise ValueError(f"GF(p) needs a prime, got {self.p}")
        elif self.p is not None:
            raise ValueError("only prime fields take a characteristic")

    @classmethod
    def parse(cls, text: str) -> "RingSpec":
        t = text.strip()
        if t in ("Z", "Q", "Z~"):
            return cls(t)
        if t.startswith("Zp:"):
            try:
                p = int(t[3:])
            except ValueError:
                raise ValueError(f"bad prime in ring {text!r}") from None
            return cls("Zp", p)
        raise ValueError(f"unknown ring {text!r}; expected Z, Q, Z~ or Zp:<p>")

    def __str__(self) -> str:
        return f"Zp:{self.p}" if self.kind == "Zp" else self.kind

    @property
    def is_field(self) -> bool:
        return self.kind in ("Q", "Zp")


def Integers() -> RingSpec:
    return RingSpec("Z")


def Rationals() -> RingSpec:
    return RingSpec("Q")


def PrimeField(p: int) -> RingSpec:
    return RingSpec("Zp", p)


def IntegersAwayFrom2() -> RingSpec:
    return RingSpec("Z~")


# ---------------------------------------------------------------------------
# groups and SNF


@dataclass(frozen=True)
class HomologyGroup:
    """``Z^free_rank`` plus cyclic summands ``(Z_{p^e})^mult`` listed as
    sorted ``(p, e, mult)`` triples."""

    free_rank: int = 0
    torsion: tuple[tuple[int, int, int], ...] = ()

    def __post_init__(self):
        if self.free_rank < 0:
            raise ValueError("negative free rank")
        merged: Counter = Counter()
        for p, e, m in self.torsion:
            if m < 0 or e < 1 or not isprime(p):
                raise ValueError(f"bad torsion entry {(p, e, m)}")
            if m:
                merged[p, e] += m
        object.__setattr__(self, "torsion", tuple(sorted((p, e, m) for (p, e), m in merged.items())))

    @classmethod
    def from_factors(cls, free_rank: int, factors: Iterable[int]) -> "HomologyGroup":
        tors: Counter = Counter()
        for f in factors:
            for p, e in factorint(int(f)).items():
                tors[p, e] += 1
        return cls(free_rank, tuple((p, e, m) for (p, e), m in tors.items()))

    def is_zero(self) -> bool:
        return self.free_rank == 0 and not self.torsion

    def p_rank(self, p: int) -> int:
        """Number of cyclic summands of p-power order."""
        return sum(m for q, e, m in self.torsion if q == p)

    def primes(self) -> list[int]:
        return sorted({p for p, _, _ in self.torsion})

    def without_prime(self, p: int) -> "HomologyGroup":
        return HomologyGroup(self.free_rank, tuple(t for t in self.torsion if t[0] != p))

    def __add__(self, other: "HomologyGroup") -> "HomologyGroup":
        return HomologyGroup(self.free_rank + other.free_rank, self.torsion + other.torsion)

    def scaled(self, k: int) -> "HomologyGroup":
        return HomologyGroup(self.free_rank * k, tuple((p, e, m * k) for p, e, m in self.torsion))

    def __str__(self) -> str:
        parts = []
        if self.free_rank:
            parts.append("Z" if self.free_rank == 1 else f"Z^{self.free_rank}")
        for p, e, m in self.torsion:
            q = p**e
            parts.append(f"Z_{q}" if m == 1 else f"(Z_{q})^{m}")
        return " + ".join(parts) if parts else "0"

    def to_json(self) -> dict:
        return {"free_rank": self.free_rank,
                "torsion": [{"prime": p, "exponent": e, "multiplicity": m} for p, e, m in self.torsion]}


@dataclass(frozen=True)
class SnfResult:
    factors: tuple[int, ...]
    shape: tuple[int, int] = (0, 0)

    @property
    def rank(self) -> int:
        return len(self.factors)

    @property
    def nontrivial(self) -> tuple[int, ...]:
        return tuple(f for f in self.factors if f > 1)


def _divisibility_chain(diagonal: Sequence[int]) -> tuple[int, ...]:
    """Invariant factors of ``diag(diagonal)``: sort the prime exponents
    separately for every prime and multiply back up."""
    k = len(diagonal)
    exps: dict[int, list[int]] = {}
    for i, x in enumerate(diagonal):
        if x == 0:
            raise ValueError("zero on the diagonal")
        if abs(x) > 1:
            for p, e in factorint(abs(int(x))).items():
                exps.setdefault(p, []).append(e)
    out = [1] * k
    for p, es in exps.items():
        es = sorted(es)
        for i, e in enumerate(es):
            out[k - len(es) + i] *= p**e
    return tuple(out)


def smith_normal_form(m: SparseIntMatrix) -> SnfResult:
    return SnfResult(_divisibility_chain(elimination.integer_diagonal(m)), m.shape)


def rank_over_field(m: SparseIntMatrix, ring: RingSpec) -> int:
    if ring.kind == "Q":
        return elimination.rank_rational(m)
    if ring.kind == "Zp":
        return elimination.rank_mod_p(m, ring.p)
    raise ValueError(f"{ring} is not a field")


# ---------------------------------------------------------------------------
# homology


def _window(cx: ChainComplex, degrees) -> list[int]:
    if degrees is None:
        return list(cx.degrees)
    lo, hi = degrees
    return [d for d in range(lo, hi + 1)]


def _map_jobs(fn, jobs, threads: int):
    if threads <= 1 or len(jobs) <= 1:
        return [fn(j) for j in jobs]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, jobs))


def homology(cx: ChainComplex, ring: RingSpec | str = "Z", degrees: tuple[int, int] | None = None,
             check: bool = True, threads: int = 1) -> dict[int, HomologyGroup]:
    """``H_d`` for every ``d`` in the window (default: all degrees).

    Only the boundary maps touching the window are reduced, so a single
    degree of a large complex costs two eliminations.
    """
    if isinstance(ring, str):
        ring = RingSpec.parse(ring)
    if check and not verify_d_squared(cx):
        raise InvariantError(f"boundary of {cx.name or 'complex'} does not square to zero")
    ds = _window(cx, degrees)
    needed = sorted({d for d in ds} | {d + 1 for d in ds})
    needed = [d for d in needed if cx.rank(d) and cx.rank(d - 1)]

    if ring.is_field:
        ranks = dict(zip(needed, _map_jobs(lambda d: rank_over_field(cx.boundary(d), ring), needed, threads)))
        snfs = None
    else:
        snf_list = _map_jobs(lambda d: smith_normal_form(cx.boundary(d)), needed, threads)
        snfs = dict(zip(needed, snf_list))
        ranks = {d: s.rank for d, s in snfs.items()}

    out = {}
    for d in ds:
        free = cx.rank(d) - ranks.get(d, 0) - ranks.get(d + 1, 0)
        if ring.is_field:
            out[d] = HomologyGroup(free)
            continue
        h = HomologyGroup.from_factors(free, snfs[d + 1].nontrivial if d + 1 in snfs else ())
        if ring.kind == "Z~":
            h = h.without_prime(2)
        out[d] = h
    return out


def betti_numbers(cx: ChainComplex, ring: RingSpec | str = "Q", degrees=None, check: bool = True,
                  threads: int = 1) -> dict[int, int]:
    return {d: h.free_rank for d, h in homology(cx, ring, degrees, check, threads).items()}


def uct_reconcile(betti_rational: dict[int, int], betti_mod_p: dict[int, int], p: int | None = None) -> dict[int, int]:
    """p-ranks rho_d from ``dim H_d(F_p) = beta_d + rho_d + rho_{d-1}``,
    solved upwards from the lowest degree with rho below it taken as 0."""
    if set(betti_rational) != set(betti_mod_p):
        raise ValueError("rational and modular Betti numbers cover different degrees")
    rho: dict[int, int] = {}
    prev = 0
    for d in sorted(betti_rational):
        r = betti_mod_p[d] - betti_rational[d] - prev
        if r < 0:
            raise InvariantError(f"negative {p}-rank {r} in degree {d}: inconsistent ranks")
        rho[d] = r
        prev = r
    return rho


def torsion_transfer_bound(q: int, group_order: int) -> int:
    """Order guaranteed in the ambient complex when the quotient by a group
    of the given order has an element of order ``q``."""
    if q < 1 or group_order < 1:
        raise ValueError("q and the group order must be positive")
    return q // gcd(q, group_order)


@dataclass
class ModularResult:
    """Rational Betti numbers and p-ranks obtained from field ranks alone.
    The p-ranks count cyclic p-power summands; their orders are unknown."""

    betti: dict[int, int]
    mod_p_betti: dict[int, dict[int, int]]
    p_ranks: dict[int, dict[int, int]] = field(default_factory=dict)


def modular_homology(cx: ChainComplex, primes: Sequence[int] = DEFAULT_PRIMES, degrees=None,
                     check: bool = True, threads: int = 1) -> ModularResult:
    """Betti numbers over Q and every GF(p), reconciled into p-ranks.

    The window is widened downwards to the bottom degree so that the
    recursion starts from a true zero.
    """
    if check and not verify_d_squared(cx):
        raise InvariantError(f"boundary of {cx.name or 'complex'} does not square to zero")
    lo, hi = (cx.d_min, cx.d_max) if degrees is None else (cx.d_min, degrees[1])
    window = (lo, hi)
    betti = betti_numbers(cx, "Q", window, check=False, threads=threads)
    mod = {}
    ranks = {}
    for p in primes:
        mod[p] = betti_numbers(cx, PrimeField(p), window, check=False, threads=threads)
        ranks[p] = uct_reconcile(betti, mod[p], p)
    if degrees is not None:
        keep = set(range(degrees[0], degrees[1] + 1))
        betti = {d: v for d, v in betti.items() if d in keep}
        mod = {p: {d: v for d, v in m.items() if d in keep} for p, m in mod.items()}
        ranks = {p: {d: v for d, v in m.items() if d in keep} for p, m in ranks.items()}
    return ModularResult(betti, mod, ranks)


# ---------------------------------------------------------------------------
# reports


def homology_report(cx: ChainComplex, result: dict[int, HomologyGroup] | ModularResult, ring: RingSpec | str,
                    runtime: float | None = None) -> dict:
    """JSON-ready report.  Every torsion prime carries the order guaranteed
    in the ambient complex given the acting group order stored on ``cx``."""
    group_order = int(cx.meta.get("group_order", 1))
    rep = {
        "complex": cx.name,
        "ring": str(ring),
        "group_order": group_order,
        "chain_ranks": {str(d): cx.rank(d) for d in cx.degrees},
        "matrix_shapes": {str(d): list(cx.boundary(d).shape) for d in cx.degrees},
    }
    if isinstance(result, ModularResult):
        rep["mode"] = "modular"
        rep["caveat"] = ("p-ranks come from field ranks; the true groups may contain "
                         "cyclic summands of higher p-power order")
        rep["homology"] = {
            str(d): {"free_rank": b,
                     "mod_p_ranks": {str(p): result.p_ranks[p][d] for p in sorted(result.p_ranks)}}
            for d, b in sorted(result.betti.items())
        }
    else:
        rep["mode"] = "exact"
        hom = {}
        for d, h in sorted(result.items()):
            entry = h.to_json()
            for t in entry["torsion"]:
                t["ambient_order_bound"] = torsion_transfer_bound(t["prime"] ** t["exponent"], group_order)
            entry["text"] = str(h)
            hom[str(d)] = entry
        rep["homology"] = hom
    if runtime is not None:
        rep["runtime_seconds"] = round(runtime, 3)
    return rep


def timed(fn, *args, **kw):
    t = time.perf_counter()
    out = fn(*args, **kw)
    return out, time.perf_counter() - t
