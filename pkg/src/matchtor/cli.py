"""Command line front end: ``matchtor {build,homology,decompose,verify,report}``."""
from __future__ import annotations

import argparse
import io
import json
import logging
import re
import sys
import time
import warnings

from . import builders
from .chain import (
    BudgetExceeded,
    ChainComplex,
    FormatError,
    read_chaincomplex,
    same_complex,
    verify_d_squared,
    write_chaincomplex,
)
from .combinatorics import BlockPartition, Signature
from .decomposition import (
    decompose_matching_homology,
    decomposition_json,
    decomposition_markdown,
)
from .homology import (
    DEFAULT_PRIMES,
    HomologyGroup,
    InvariantError,
    ModularResult,
    RingSpec,
    homology,
    homology_report,
    modular_homology,
)

log = logging.getLogger("matchtor")

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_BUDGET = 3
EXIT_INVARIANT = 4
EXIT_IO = 5

KINDS = ("matching", "bd", "delta", "reduced", "wreath", "lie", "norm-subcomplex")


class UsageError(ValueError):
    pass


def parse_signature(text: str) -> Signature:
    return Signature.parse(text.replace(" ", ""))


_BLOCK_RE = re.compile(r"\{([0-9,\s]+)\}")


def parse_blocks(text: str, sig: Signature) -> BlockPartition:
    t = text.replace(" ", "")
    blocks = _BLOCK_RE.findall(t)
    if not blocks or "".join("{" + b + "}" for b in blocks) != t:
        raise ValueError(f"malformed block list {text!r}")
    parsed = []
    for b in blocks:
        try:
            parsed.append(tuple(int(x) for x in b.split(",")))
        except ValueError:
            raise ValueError(f"malformed block {{{b}}}") from None
    return BlockPartition.validated(parsed, sig)


def parse_degrees(text: str) -> tuple[int, int]:
    m = re.fullmatch(r"\s*(-?\d+)\s*(?:\.\.\s*(-?\d+)\s*)?", text)
    if not m:
        raise ValueError(f"degree window must look like 'a..b' or 'a', got {text!r}")
    lo = int(m.group(1))
    hi = int(m.group(2)) if m.group(2) is not None else lo
    if hi < lo:
        raise ValueError(f"empty degree window {text!r}")
    return lo, hi


def parse_primes(text: str) -> tuple[int, ...]:
    try:
        ps = tuple(int(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise ValueError(f"bad prime list {text!r}") from None
    for p in ps:
        RingSpec("Zp", p)
    return ps


# ---------------------------------------------------------------------------
# complex construction


def build_from_args(args) -> ChainComplex:
    if getattr(args, "input", None):
        with open(args.input) as fh:
            cx = read_chaincomplex(fh)
        if args.group_order:
            cx.meta["group_order"] = args.group_order
        return cx
    kind = args.kind
    if kind is None:
        raise UsageError("either --in or --kind is required")
    cap = args.max_generators
    if kind == "matching":
        if args.n is None:
            raise UsageError("--kind matching needs --n")
        return builders.build_matching_complex(args.n, cap)
    if args.sig is None:
        raise UsageError(f"--kind {kind} needs --sig")
    if kind == "lie":
        # charges are irrelevant for the Lie complex; accept bare sizes too
        sizes = [int(tok.rstrip("+-")) for tok in args.sig.replace(" ", "").split(",")]
        return builders.build_lie_complex(sizes, cap)
    sig = parse_signature(args.sig)
    if kind == "bd":
        return builders.build_bd_complex(sig, cap)
    if kind == "delta":
        return builders.build_delta_quotient(sig, cap)
    if kind == "reduced":
        return builders.build_reduced_quotient(sig, cap)
    if kind == "wreath":
        if args.blocks is None:
            raise UsageError("--kind wreath needs --blocks")
        return builders.build_wreath_quotient(sig, parse_blocks(args.blocks, sig), cap, args.max_group)
    if kind == "norm-subcomplex":
        n = args.n if args.n is not None else sig.n
        return builders.build_norm_subcomplex_from_matching(n, sig, cap, args.max_group)
    raise UsageError(f"unknown kind {kind!r}")


def check_memory(cx: ChainComplex, limit_gib: float) -> None:
    # rough cost of the dict-of-dicts elimination state, with fill-in headroom
    est = sum(cx.boundary(d).nnz for d in cx.degrees) * 400
    if est > limit_gib * 2**30:
        raise BudgetExceeded(f"boundary matrices need about {est / 2**30:.1f} GiB (cap {limit_gib} GiB); "
                             "try modular mode with --primes or a narrower --degrees window")


# ---------------------------------------------------------------------------
# output helpers


def emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def dump_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def homology_markdown(cx: ChainComplex, result) -> str:
    lines = [f"Homology of {cx.name or 'complex'}", ""]
    if isinstance(result, ModularResult):
        primes = sorted(result.p_ranks)
        lines.append("| d | Betti | " + " | ".join(f"{p}-rank" for p in primes) + " |")
        lines.append("|---" * (len(primes) + 2) + "|")
        for d, b in sorted(result.betti.items()):
            lines.append(f"| {d} | {b} | " + " | ".join(str(result.p_ranks[p][d]) for p in primes) + " |")
        lines.append("")
        lines.append("p-ranks derived from field ranks; orders of the p-power summands are not determined.")
    else:
        lines.append("| d | rank C_d | H_d |")
        lines.append("|---|---|---|")
        for d, h in sorted(result.items()):
            lines.append(f"| {d} | {cx.rank(d)} | {h} |")
    return "\n".join(lines) + "\n"


def _compute(cx: ChainComplex, args):
    window = parse_degrees(args.degrees) if args.degrees else None
    check_memory(cx, args.max_memory_gib)
    t0 = time.perf_counter()
    if args.primes:
        res = modular_homology(cx, parse_primes(args.primes), window, threads=args.threads)
        ring = "modular:" + args.primes
    else:
        ring = RingSpec.parse(args.ring)
        res = homology(cx, ring, window, threads=args.threads)
    return res, ring, time.perf_counter() - t0


# ---------------------------------------------------------------------------
# subcommands


def cmd_build(args) -> int:
    cx = build_from_args(args)
    if args.format == "chaincomplex":
        buf = io.StringIO()
        write_chaincomplex(cx, buf)
        emit(buf.getvalue(), args.out)
    else:
        summary = {"complex": cx.name, "chain_ranks": {str(d): cx.rank(d) for d in cx.degrees},
                   "nnz": {str(d): cx.boundary(d).nnz for d in cx.degrees},
                   "group_order": int(cx.meta.get("group_order", 1))}
        if args.format == "json":
            emit(dump_json(summary), args.out)
        else:
            lines = [f"{cx.name}", "", "| d | rank | nnz(∂_d) |", "|---|---|---|"]
            lines += [f"| {d} | {cx.rank(d)} | {cx.boundary(d).nnz} |" for d in cx.degrees]
            emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def cmd_homology(args) -> int:
    cx = build_from_args(args)
    res, ring, dt = _compute(cx, args)
    if args.format == "markdown":
        emit(homology_markdown(cx, res), args.out)
    else:
        emit(dump_json(homology_report(cx, res, ring, dt if args.timing else None)), args.out)
    return EXIT_OK


def cmd_decompose(args) -> int:
    if args.n is None or args.r is None:
        raise UsageError("decompose needs --n and --r")
    window = parse_degrees(args.degrees) if args.degrees else None
    primes = parse_primes(args.primes) if args.primes else None
    dec = decompose_matching_homology(args.n, args.r, args.ring, primes, window,
                                      args.max_generators, args.threads)
    if args.format == "json":
        emit(dump_json(decomposition_json(dec)), args.out)
    else:
        emit(decomposition_markdown(dec), args.out)
    return EXIT_BUDGET if dec.partial else EXIT_OK


def verify_complex(cx: ChainComplex, primes=(3, 5, 7)) -> list[tuple[str, bool]]:
    checks = [("d_squared_zero", verify_d_squared(cx))]
    buf = io.StringIO()
    write_chaincomplex(cx, buf)
    again = read_chaincomplex(io.StringIO(buf.getvalue()))
    checks.append(("file_round_trip", same_complex(cx, again)))
    if checks[0][1]:
        hz = homology(cx, "Z", check=False)
        hq = homology(cx, "Q", check=False)
        betti = {d: h.free_rank for d, h in hz.items()}
        checks.append(("rational_betti_match", betti == {d: h.free_rank for d, h in hq.items()}))
        chi = sum((-1) ** (d % 2) * b for d, b in betti.items())
        checks.append(("euler_characteristic", chi == cx.euler_characteristic()))
        for p in primes:
            hp = homology(cx, RingSpec("Zp", p), check=False)
            ok = all(hp[d].free_rank == betti[d] + hz[d].p_rank(p) + hz.get(d - 1, HomologyGroup()).p_rank(p)
                     for d in hz)
            checks.append((f"uct_p{p}", ok))
    return checks


def cmd_verify(args) -> int:
    cx = build_from_args(args)
    checks = verify_complex(cx)
    if args.format == "json":
        emit(dump_json({"complex": cx.name, "checks": dict(checks)}), args.out)
    else:
        emit("".join(f"{'ok  ' if ok else 'FAIL'} {name}\n" for name, ok in checks), args.out)
    return EXIT_OK if all(ok for _, ok in checks) else EXIT_INVARIANT


def cmd_report(args) -> int:
    """Chain ranks, integer homology and modular p-ranks in one document,
    with the modular p-ranks cross-checked against the integer torsion."""
    cx = build_from_args(args)
    window = parse_degrees(args.degrees) if args.degrees else None
    check_memory(cx, args.max_memory_gib)
    primes = parse_primes(args.primes) if args.primes else DEFAULT_PRIMES[:3]
    hz = homology(cx, RingSpec.parse(args.ring), window, threads=args.threads)
    mod = modular_homology(cx, primes, window, check=False, threads=args.threads)
    mismatches = []
    if RingSpec.parse(args.ring).kind in ("Z", "Z~"):
        for p in primes:
            for d, h in hz.items():
                if mod.p_ranks[p].get(d, 0) != h.p_rank(p):
                    mismatches.append(f"degree {d}, p={p}: modular {mod.p_ranks[p].get(d, 0)}, exact {h.p_rank(p)}")
    rep = homology_report(cx, hz, args.ring)
    rep["modular"] = homology_report(cx, mod, "modular")["homology"]
    rep["consistent"] = not mismatches
    if args.format == "markdown":
        text = homology_markdown(cx, hz) + "\n" + homology_markdown(cx, mod)
        if mismatches:
            text += "\nInconsistencies:\n" + "".join(f"- {m}\n" for m in mismatches)
        emit(text, args.out)
    else:
        emit(dump_json(rep), args.out)
    return EXIT_INVARIANT if mismatches else EXIT_OK


# ---------------------------------------------------------------------------


def make_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="matchtor", description=__doc__)
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, fmt_default, formats):
        p.add_argument("--kind", choices=KINDS)
        p.add_argument("--sig", help='signature such as "2+,3-,3-"')
        p.add_argument("--blocks", help='block partition such as "{1}{2,3,4,5}"')
        p.add_argument("--n", type=int)
        p.add_argument("--r", type=int)
        p.add_argument("--in", dest="input", help="read a CHAINCOMPLEX v1 file instead of building")
        p.add_argument("--group-order", type=int, default=0,
                       help="acting group order for torsion transfer bounds of imported complexes")
        p.add_argument("--ring", default="Z", help="Z, Q, Z~ or Zp:<p>")
        p.add_argument("--primes", help="comma separated primes; switches to modular mode")
        p.add_argument("--degrees", help="degree window a..b")
        p.add_argument("--out")
        p.add_argument("--format", choices=formats, default=fmt_default)
        p.add_argument("--threads", type=int, default=1)
        p.add_argument("--timing", action="store_true", help="include runtimes (breaks byte-identical output)")
        p.add_argument("--max-generators", type=int, default=builders.DEFAULT_GENERATOR_CAP)
        p.add_argument("--max-group", type=int, default=10**6)
        p.add_argument("--max-memory-gib", type=float, default=2.0)
        return p

    common(sub.add_parser("build", help="build a complex"), "chaincomplex",
           ("chaincomplex", "json", "markdown")).set_defaults(func=cmd_build)
    common(sub.add_parser("homology", help="compute homology"), "json",
           ("json", "markdown")).set_defaults(func=cmd_homology)
    common(sub.add_parser("decompose", help="split M_n by disjoint transpositions"), "markdown",
           ("json", "markdown")).set_defaults(func=cmd_decompose)
    common(sub.add_parser("verify", help="check d^2 = 0, file round trip, Euler characteristic, UCT"),
           "markdown", ("json", "markdown")).set_defaults(func=cmd_verify)
    common(sub.add_parser("report", help="integer and modular homology with cross-checks"), "json",
           ("json", "markdown")).set_defaults(func=cmd_report)
    return ap


def main(argv=None) -> int:
    ap = make_parser()
    args = ap.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    warnings.simplefilter("default")
    try:
        return args.func(args)
    except (UsageError, FormatError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except BudgetExceeded as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except InvariantError as exc:
        print(f"invariant failure: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
