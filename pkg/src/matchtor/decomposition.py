"""Splitting matching-complex homology into sign-vector pieces.

Fixing ``r`` disjoint transpositions ``(1 2), (3 4), ...`` gives an
elementary abelian 2-group acting on ``M_n``.  Away from 2 the homology
breaks up along its characters; a character with ``i`` minus signs
contributes the reduced complex of ``(2^r 1^{n-2r})`` charged
``(+)^{r-i} (-)^i`` and there are ``binom(r, i)`` such characters.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from math import comb

from .builders import build_reduced_quotient
from .chain import BudgetExceeded
from .combinatorics import Charge, Signature
from .homology import (
    HomologyGroup,
    IntegersAwayFrom2,
    ModularResult,
    RingSpec,
    homology,
    modular_homology,
)

log = logging.getLogger(__name__)


def piece_signature(n: int, r: int, i: int) -> Signature:
    if not 0 <= 2 * r <= n or not 0 <= i <= r:
        raise ValueError(f"need 2r <= n and 0 <= i <= r, got n={n}, r={r}, i={i}")
    sizes = [2] * r + [1] * (n - 2 * r)
    # sign of a size-1 part plays no role; keep them positive
    charges = [Charge.POS] * (r - i) + [Charge.NEG] * i + [Charge.POS] * (n - 2 * r)
    return Signature.of(sizes, charges)


@dataclass
class SignVectorPiece:
    i: int
    signature: Signature
    multiplicity: int
    homology: dict[int, HomologyGroup] | None = None
    modular: ModularResult | None = None
    error: str | None = None

    @property
    def minus_count(self) -> int:
        return self.i


@dataclass
class Decomposition:
    n: int
    r: int
    pieces: list[SignVectorPiece]
    aggregate: dict[int, HomologyGroup] = field(default_factory=dict)
    partial: bool = False
    ring: str = "Z~"


def aggregate(pieces) -> dict[int, HomologyGroup]:
    """Direct sum of the piece homologies weighted by multiplicity; pieces
    without a result are skipped."""
    out: dict[int, HomologyGroup] = {}
    for pc in pieces:
        if pc.homology is None:
            continue
        for d, h in pc.homology.items():
            out[d] = out.get(d, HomologyGroup()) + h.scaled(pc.multiplicity)
    return dict(sorted(out.items()))


def aggregate_modular(pieces) -> tuple[dict[int, int], dict[int, dict[int, int]]]:
    betti: dict[int, int] = {}
    ranks: dict[int, dict[int, int]] = {}
    for pc in pieces:
        m = pc.modular
        if m is None:
            continue
        for d, b in m.betti.items():
            betti[d] = betti.get(d, 0) + pc.multiplicity * b
        for p, rp in m.p_ranks.items():
            tgt = ranks.setdefault(p, {})
            for d, v in rp.items():
                tgt[d] = tgt.get(d, 0) + pc.multiplicity * v
    return betti, ranks


def decompose_matching_homology(n: int, r: int, ring: RingSpec | str | None = None,
                                primes=None, degrees=None, cap: int = 10**6,
                                threads: int = 1) -> Decomposition:
    """Build the ``r+1`` pieces and compute their homology.

    With ``primes`` given the pieces are computed in modular mode (Betti
    numbers plus p-ranks); otherwise exactly over ``ring`` (default Z~).
    2-torsion is never reported since the splitting only holds away from 2.
    """
    if ring is None:
        ring = IntegersAwayFrom2()
    elif isinstance(ring, str):
        ring = RingSpec.parse(ring)
    if ring.kind == "Z":
        ring = IntegersAwayFrom2()
    pieces = []
    partial = False
    for i in range(r + 1):
        sig = piece_signature(n, r, i)
        pc = SignVectorPiece(i, sig, comb(r, i))
        try:
            cx = build_reduced_quotient(sig, cap)
            if primes:
                pc.modular = modular_homology(cx, primes, degrees, threads=threads)
            else:
                pc.homology = homology(cx, ring, degrees, threads=threads)
        except BudgetExceeded as exc:
            pc.error = str(exc)
            partial = True
            log.warning("piece %d of (n=%d, r=%d) skipped: %s", i, n, r, exc)
        pieces.append(pc)
    dec = Decomposition(n, r, pieces, aggregate(pieces), partial, str(ring))
    return dec


def kr_parameters(n: int, d: int) -> tuple[int, int]:
    return 3 * d - n + 4, n - 2 * d - 3


def nd_parameters(k: int, r: int) -> tuple[int, int]:
    return 2 * k + 1 + 3 * r, k - 1 + r


# ---------------------------------------------------------------------------
# output


def decomposition_json(dec: Decomposition) -> dict:
    def piece(pc: SignVectorPiece) -> dict:
        out = {"minus_count": pc.i, "signature": str(pc.signature), "factor": pc.multiplicity}
        if pc.homology is not None:
            out["homology"] = {str(d): dict(h.to_json(), text=str(h)) for d, h in pc.homology.items()}
        if pc.modular is not None:
            out["betti"] = {str(d): b for d, b in pc.modular.betti.items()}
            out["mod_p_ranks"] = {str(p): {str(d): v for d, v in rp.items()}
                                  for p, rp in pc.modular.p_ranks.items()}
        if pc.error:
            out["error"] = pc.error
        return out

    rep = {"n": dec.n, "r": dec.r, "ring": "Z~", "partial": dec.partial,
           "pieces": [piece(pc) for pc in dec.pieces]}
    if any(pc.modular is not None for pc in dec.pieces):
        betti, ranks = aggregate_modular(dec.pieces)
        rep["mode"] = "modular"
        rep["aggregate"] = {"betti": {str(d): b for d, b in betti.items()},
                            "mod_p_ranks": {str(p): {str(d): v for d, v in rp.items()}
                                            for p, rp in ranks.items()}}
    else:
        rep["mode"] = "exact"
        rep["aggregate"] = {str(d): dict(h.to_json(), text=str(h)) for d, h in dec.aggregate.items()}
    return rep


def _sign_string(r: int, i: int) -> str:
    return "+" * (r - i) + "-" * i


def decomposition_markdown(dec: Decomposition) -> str:
    """One row per sign vector, one column per degree, and a closing row with
    the weighted sum."""
    if any(pc.modular is not None for pc in dec.pieces):
        betti, ranks = aggregate_modular(dec.pieces)
        degs = sorted(betti)
        primes = sorted(ranks)

        def cell(b, rp):
            bits = [f"b={b}"] + [f"rho{p}={rp[p]}" for p in primes if rp.get(p)]
            return " ".join(bits)

        lines = [f"| signs | " + " | ".join(f"d={d}" for d in degs) + " | factor |",
                 "|---" * (len(degs) + 2) + "|"]
        for pc in dec.pieces:
            m = pc.modular
            cells = ["n/a" if m is None else cell(m.betti.get(d, 0), {p: m.p_ranks[p].get(d, 0) for p in primes})
                     for d in degs]
            lines.append(f"| {_sign_string(dec.r, pc.i)} | " + " | ".join(cells) + f" | {pc.multiplicity} |")
        cells = [cell(betti[d], {p: ranks[p].get(d, 0) for p in primes}) for d in degs]
        lines.append("| total | " + " | ".join(cells) + " | |")
        return "\n".join(lines) + "\n"

    degs = sorted({d for pc in dec.pieces if pc.homology for d, h in pc.homology.items() if not h.is_zero()})
    lines = [f"Homology of M_{dec.n} over Z~ split by {dec.r} transpositions", "",
             "| signs | " + " | ".join(f"d={d}" for d in degs) + " | factor |",
             "|---" * (len(degs) + 2) + "|"]
    for pc in dec.pieces:
        if pc.homology is None:
            cells = ["n/a"] * len(degs)
        else:
            cells = [("-" if pc.homology.get(d, HomologyGroup()).is_zero() else str(pc.homology[d])) for d in degs]
        lines.append(f"| {_sign_string(dec.r, pc.i)} | " + " | ".join(cells) + f" | {pc.multiplicity} |")
    tot = [str(dec.aggregate.get(d, HomologyGroup())) for d in degs]
    lines.append("| total | " + " | ".join(tot) + " | |")
    return "\n".join(lines) + "\n"
