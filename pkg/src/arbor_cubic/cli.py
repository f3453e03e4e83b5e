"""Command-line front end: ``arbor-cubic <verb> ...``.

Exit codes: 0 success or verified, 1 inconclusive or failed verification,
2 usage error. Data goes to stdout, progress to stderr.
"""

from __future__ import annotations

import argparse
import json
import logging
import random
import sys
from typing import Optional, Sequence

from .arith import format_rational, parse_rational
from .certify import certify, certify_function_field, check_h_escape
from .dynamics import (
    MAX_LOCUS_LEVEL,
    CubicParams,
    DegenerateCriticalPoint,
    NoCollision,
    collision_index,
    collision_locus,
    orbit,
)
from .groups import (
    MAX_DEPTH,
    HypothesisFailure,
    WitnessError,
    aut_order,
    construct_witnesses,
    h_subgroup,
    is_arboreally_doubly_transitive,
    q_group,
    q_order,
    random_signed_subgroup,
    verify_generation,
)
from .replay import replay, replay_ok
from .tree import InconsistentSData, SignedAut, TreePortrait, relabel, s_value, signed_closure

log = logging.getLogger("arbor_cubic")

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


def _rational(text: str):
    try:
        return parse_rational(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _emit(args, obj, text: str) -> None:
    if args.json:
        print(json.dumps(obj, indent=2))
    else:
        print(text)


def _params(args) -> CubicParams:
    return CubicParams(args.A, args.B, 1)


# -- verbs --------------------------------------------------------------------

def cmd_orbit(args) -> int:
    data = orbit(_params(args), args.n)
    rows = [(k, format_rational(data.F[k]), format_rational(data.G[k])) for k in range(args.n + 1)]
    obj = {"A": format_rational(args.A), "B": format_rational(args.B), "n": args.n,
           "F": [r[1] for r in rows], "G": [r[2] for r in rows]}
    text = "\n".join(["k\tF_k\tG_k"] + [f"{k}\t{f}\t{g}" for k, f, g in rows])
    _emit(args, obj, text)
    return EXIT_OK


def cmd_collide(args) -> int:
    if args.A is None or args.B is None:
        if args.ell is None:
            raise _Usage("collide needs --A and --B, or --ell for the locus")
        if not 2 <= args.ell <= MAX_LOCUS_LEVEL:
            raise _Usage(f"--ell must be between 2 and {MAX_LOCUS_LEVEL} for the locus")
        locus = collision_locus(args.ell)
        _emit(args, {"ell": args.ell, "locus": str(locus)}, f"F_{args.ell}(A, B) = {locus}")
        return EXIT_OK
    ell = collision_index(_params(args), args.n)
    obj = {"A": format_rational(args.A), "B": format_rational(args.B), "max_iter": args.n, "ell": ell}
    text = f"collision at iterate {ell}" if ell else f"no collision within {args.n} iterates"
    _emit(args, obj, text)
    return EXIT_OK if ell else EXIT_FAIL


def _certificate_text(cert) -> str:
    lines = [f"A = {format_rational(cert.A)}, B = {format_rational(cert.B)}, x0 = {cert.x0}, ell = {cert.ell}"]
    if cert.u is not None:
        lines.append(f"place u: {cert.u.prime} (v(x0) = {cert.u.vx0})")
    for lc in cert.levels:
        status = "pass" if lc.passed else "FAIL " + ", ".join(lc.failures())
        lines.append(f"level {lc.n}: place {lc.prime}: {status}")
    lines.append(f"conclusion: {cert.conclusion}")
    lines.append(f"note: {cert.note}")
    return "\n".join(lines)


def cmd_certify(args) -> int:
    if args.x0 is None:
        raise _Usage("certify needs --x0")
    bound = 2**args.max_factor_bits
    cert = certify(_params(args), args.x0, args.ell, args.levels, bound, progress=log.info)
    obj = cert.to_json_obj()
    text = _certificate_text(cert)
    if args.escape_prime is not None:
        report = check_h_escape(_params(args), args.x0, args.ell, args.escape_prime)
        obj = {"certificate": obj, "escape": report.to_json_obj()}
        text += "\n" + _escape_text(report)
    _emit(args, obj, text)
    return EXIT_OK if cert.passed else EXIT_FAIL


def _escape_text(report) -> str:
    lines = [f"escape check at {report.prime}:"]
    failed = [k for k, ok in report.checks.items() if not ok]
    lines.append("  hypotheses: " + ("all hold" if not failed else "fail " + ", ".join(failed)))
    lines.append(f"  quartic: {report.to_json_obj()['quartic']}")
    if report.polygon is not None:
        lines.append("  polygon slopes: " + ", ".join(format_rational(s) for s in report.polygon.slopes))
    roots = ", ".join(format_rational(r) for r in report.rational_roots) or "none"
    lines.append(f"  rational roots: {roots}")
    lines.extend("  note: " + n for n in report.notes)
    return "\n".join(lines)


def cmd_certify_ff(args) -> int:
    cert = certify_function_field(_params(args), args.ell, args.levels)
    _emit(args, cert.to_json_obj(), _certificate_text(cert))
    return EXIT_OK if cert.passed else EXIT_FAIL


def _group_for(args):
    if args.subgroup == "h":
        if args.n != args.ell:
            raise _Usage("the H subgroup lives at depth ell")
        return h_subgroup(args.ell)
    return q_group(args.ell, args.n, tilde=args.subgroup == "qtilde")


def cmd_group(args) -> int:
    if not 1 <= args.n <= MAX_DEPTH:
        raise _Usage(f"--n must be between 1 and {MAX_DEPTH}")
    if args.ell < 2:
        raise _Usage("--ell must be >= 2")
    group = _group_for(args)
    if args.action == "order":
        expected = q_order(args.ell, args.n, tilde=args.subgroup == "qtilde") if args.subgroup != "h" else q_order(args.ell, args.n) // 4
        obj = {"ell": args.ell, "depth": args.n, "subgroup": args.subgroup, "order": str(group.order),
               "closed_form": str(expected), "aut_order": str(aut_order(args.n))}
        text = f"|{args.subgroup}_{{{args.ell},{args.n}}}| = {group.order} (closed form {expected}; |Aut| = {aut_order(args.n)})"
        _emit(args, obj, text)
        return EXIT_OK if group.order == expected else EXIT_FAIL
    if args.action == "describe":
        print(json.dumps(group.to_json_obj(args.ell), indent=2))
        return EXIT_OK
    if args.action == "transitive":
        ok = is_arboreally_doubly_transitive(group, args.n)
        _emit(args, {"level": args.n, "doubly_transitive": ok}, f"arboreally doubly transitive at level {args.n}: {ok}")
        return EXIT_OK if ok else EXIT_FAIL
    if args.n < args.ell:
        raise _Usage("verify-gen and witnesses need ell <= n")
    if args.action == "verify-gen":
        report = verify_generation(group, args.ell)
        text = "\n".join(
            [f"{k}: {'n/a' if v is None else ('pass' if v else 'FAIL')}  {report.details.get(k, '')}".rstrip()
             for k, v in report.checks.items()]
            + [f"order {report.order}, Q order {report.target_order}",
               f"hypotheses hold: {report.hypotheses_hold}; G = Q: {report.conclusion_holds}"]
        )
        _emit(args, report.to_json_obj(), text)
        return EXIT_OK if report.hypotheses_hold and report.conclusion_holds else EXIT_FAIL
    try:
        ws = construct_witnesses(group, args.ell)
    except HypothesisFailure as exc:
        _emit(args, {"error": str(exc), "failed": exc.report.failed()}, str(exc))
        return EXIT_FAIL
    except WitnessError as exc:
        _emit(args, {"error": str(exc), "step": exc.step}, str(exc))
        return EXIT_FAIL
    obj = {
        "m": ws.m, "z0": ws.z0, "z1": ws.z1,
        "theta": ws.theta.to_json_obj(),
        "rho": {f"{a},{b}": r.to_json_obj() for (a, b), r in ws.rho_samples.items()},
        "mu": {a: r.to_json_obj() for a, r in ws.mu_samples.items()},
    }
    lines = [f"theta: transpositions above {ws.z0} and {ws.z1} (m = {ws.m})"]
    lines += [f"rho_{a},{b}: support {sorted(r.support())}" for (a, b), r in ws.rho_samples.items()]
    lines += [f"mu_{a}: support {sorted(r.support())}" for a, r in ws.mu_samples.items()]
    _emit(args, obj, "\n".join(lines))
    return EXIT_OK


def cmd_example(args) -> int:
    try:
        key, lines = replay(args.name, 2**args.max_factor_bits)
    except KeyError as exc:
        raise _Usage(str(exc.args[0])) from None
    ok = replay_ok(lines)
    obj = {"example": key, "ok": ok, "entries": [line.to_json_obj() for line in lines]}
    text = "\n".join(
        [f"example {key}"]
        + [f"  [{l.kind}] {l.quantity}: expected {l.expected or '(none)'}, computed {l.computed or '(none)'} -> {l.status}"
           + (f"\n      {l.discrepancy}" if l.discrepancy else "") for l in lines]
        + [f"result: {'ok' if ok else 'MISMATCH'}"]
    )
    _emit(args, obj, text)
    return EXIT_OK if ok else EXIT_FAIL


def _load_signed(path: str) -> tuple[list[SignedAut], int]:
    with open(path) as fh:
        obj = json.load(fh)
    depth, ell = int(obj["depth"]), int(obj["ell"])
    gens = [SignedAut(TreePortrait.from_json_obj(e["aut"], depth), int(e.get("chi", 1))) for e in obj["elements"]]
    return signed_closure(gens), ell


def cmd_relabel(args) -> int:
    if args.file:
        try:
            group, ell = _load_signed(args.file)
        except (OSError, KeyError, ValueError) as exc:
            raise _Usage(f"cannot read {args.file}: {exc}") from None
    else:
        if not 1 <= args.n <= MAX_DEPTH:
            raise _Usage(f"--n must be between 1 and {MAX_DEPTH}")
        rng = random.Random(args.seed)
        group, _ = random_signed_subgroup(args.ell, args.n, rng)
        ell = args.ell
    try:
        g = relabel(group, ell)
    except InconsistentSData as exc:
        _emit(args, {"error": str(exc)}, f"inconsistent S-data: {exc}")
        return EXIT_FAIL
    depth = group[0].aut.depth
    nodes = [w for k in range(depth - ell + 1) for w in _words(k)]
    ok = all(s_value(s.conjugate(g), g(y), ell) == 1 for s in group for y in nodes)
    obj = {"ell": ell, "depth": depth, "group_size": len(group), "relabel": g.to_json_obj(), "verified": ok}
    text = f"group of size {len(group)}; relabeling map support {sorted(g.support())}; postcondition {'holds' if ok else 'FAILS'}"
    _emit(args, obj, text)
    return EXIT_OK if ok else EXIT_FAIL


def _words(k: int):
    from .tree import level_words

    return level_words(k)


# -- parser -----------------------------------------------------------------------

class _Usage(Exception):
    pass


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument("--seed", type=int, default=0, help="seed for randomized searches")
    common.add_argument("--max-factor-bits", type=int, default=128, help="give up factoring cofactors above 2^bits")
    common.add_argument("--quiet", action="store_true", help="no progress messages")

    cubic = argparse.ArgumentParser(add_help=False)
    cubic.add_argument("--A", type=_rational, help="leading coefficient A")
    cubic.add_argument("--B", type=_rational, help="linear coefficient B")

    parser = argparse.ArgumentParser(prog="arbor-cubic", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="verb", required=True)

    p = sub.add_parser("orbit", parents=[common, cubic], help="critical orbit F_k, G_k")
    p.add_argument("--n", type=int, required=True)
    p.set_defaults(func=cmd_orbit, need_ab=True)

    p = sub.add_parser("collide", parents=[common, cubic], help="collision index, or the locus for --ell")
    p.add_argument("--n", type=int, default=12, help="iterates to try")
    p.add_argument("--ell", type=int)
    p.set_defaults(func=cmd_collide, need_ab=False)

    p = sub.add_parser("certify", parents=[common, cubic], help="valuation certificate over the rationals")
    p.add_argument("--x0", type=_rational)
    p.add_argument("--ell", type=int, required=True)
    p.add_argument("--levels", "--n", dest="levels", type=int, required=True)
    p.add_argument("--escape-prime", type=int, help="also run the H-escape check at this prime")
    p.set_defaults(func=cmd_certify, need_ab=True)

    p = sub.add_parser("certify-ff", parents=[common, cubic], help="certificate for root point t over k(t)")
    p.add_argument("--ell", type=int, required=True)
    p.add_argument("--levels", "--n", dest="levels", type=int, required=True)
    p.set_defaults(func=cmd_certify_ff, need_ab=True)

    p = sub.add_parser("group", parents=[common], help="tree automorphism groups")
    p.add_argument("action", choices=["order", "verify-gen", "witnesses", "describe", "transitive"])
    p.add_argument("--ell", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--subgroup", choices=["q", "qtilde", "h"], default="q")
    p.set_defaults(func=cmd_group, need_ab=False)

    p = sub.add_parser("example", parents=[common], help="replay a worked example against bundled expectations")
    p.add_argument("name", help="generic | rational | special (or 7.1 | 7.2 | 7.3)")
    p.set_defaults(func=cmd_example, need_ab=False)

    p = sub.add_parser("relabel", parents=[common], help="relabel a signed group so every S value is +1")
    p.add_argument("--file", help="JSON with ell, depth and elements [{aut, chi}]")
    p.add_argument("--ell", type=int, default=2)
    p.add_argument("--n", type=int, default=3)
    p.set_defaults(func=cmd_relabel, need_ab=False)
    return parser


_VALUE_FLAGS = ("--A", "--B", "--x0")


def _attach_negative_values(argv: Sequence[str]) -> list[str]:
    """Turn ``--x0 -31/5`` into ``--x0=-31/5`` so argparse does not read a flag."""
    out: list[str] = []
    it = iter(argv)
    for tok in it:
        if tok in _VALUE_FLAGS:
            nxt = next(it, None)
            if nxt is None:
                out.append(tok)
            else:
                out.append(f"{tok}={nxt}")
        else:
            out.append(tok)
    return out


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(_attach_negative_values(sys.argv[1:] if argv is None else argv))
    logging.basicConfig(level=logging.WARNING if args.quiet else logging.INFO, format="%(message)s", stream=sys.stderr)
    if args.need_ab and (args.A is None or args.B is None):
        parser.error("--A and --B are required")
    try:
        return args.func(args)
    except _Usage as exc:
        parser.error(str(exc))
    except (NoCollision, DegenerateCriticalPoint) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
