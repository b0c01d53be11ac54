"""``wreathlab`` command line.

Exit codes: 0 decided / measured, 2 exhausted or unreached, 1 usage error,
3 when ``check-bounds`` finds a measured value above its bound.
"""

from __future__ import annotations

import argparse
import configparser
import datetime as _dt
import math
import sys
from typing import Optional, Sequence

from . import conjugacy as conj
from . import separability as sep
from .errors import UNREACHED, WreathLabError
from .literals import (
    ELEMENT_GRAMMAR,
    FAMILY_GRAMMAR,
    GROUP_GRAMMAR,
    parse_element,
    parse_family,
    parse_group,
)
from .magnus import magnus_embed, magnus_group, metabelian_conjugate, metabelian_is_identity, parse_word
from .wreath import WreathProduct

EXIT_OK, EXIT_USAGE, EXIT_UNREACHED, EXIT_VIOLATION = 0, 1, 2, 3

GRAMMAR = "\n".join((GROUP_GRAMMAR, ELEMENT_GRAMMAR, FAMILY_GRAMMAR, "word := x1 X1 [u,v] ... (capitals invert)"))


class UsageError(Exception):
    pass


def _stamp(args) -> Optional[str]:
    if getattr(args, "no_stamp", False):
        return None
    return _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")


def _emit(args, text: str):
    out = getattr(args, "out", None)
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _wreath(args) -> WreathProduct:
    W = parse_group(args.group)
    if not isinstance(W, WreathProduct):
        raise UsageError(f"{args.group!r} is not a wreath product")
    return W


def _value_line(v) -> tuple[str, int]:
    if v is UNREACHED:
        return "Unreached", EXIT_UNREACHED
    return str(v), EXIT_OK


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def cmd_decide(args) -> int:
    W = _wreath(args)
    x, y = parse_element(W, args.x), parse_element(W, args.y)
    if args.mm:
        v = conj.malcev_mostowski(W, x, y, parse_family(args.family), args.max_index, args.radius)
    else:
        v = conj.decide(W, x, y, args.radius)
    print(conj.verdict_line(W, v))
    return EXIT_UNREACHED if isinstance(v, conj.Exhausted) else EXIT_OK


def cmd_depth(args) -> int:
    W = _wreath(args)
    x, y = parse_element(W, args.x), parse_element(W, args.y)
    d = sep.depth_conjugacy(W, x, y, parse_family(args.family), args.max_index)
    line, code = _value_line(d)
    print(line)
    return code


def cmd_profile(args) -> int:
    W = _wreath(args)
    fam = parse_family(args.family)
    bound = _bound_for(args, W)
    prof = sep.conj_profile(W, args.n_max, fam, args.max_index, args.workers, bound, args.digit_cap)
    _emit(args, sep.profile_csv([prof], _stamp(args)))
    return EXIT_UNREACHED if any(r.measured is UNREACHED for r in prof.rows) else EXIT_OK


def cmd_girth(args) -> int:
    B = parse_group(args.group)
    fam = parse_family(args.family)
    if args.n_max is not None:
        prof = sep.girth_profile(B, args.n_max, fam, args.max_index)
        _emit(args, sep.profile_csv([prof], _stamp(args)))
        return EXIT_UNREACHED if any(r.measured is UNREACHED for r in prof.rows) else EXIT_OK
    line, code = _value_line(sep.residual_girth(B, fam, args.n, args.max_index))
    print(line)
    return code


def cmd_cyclic(args) -> int:
    B = parse_group(args.group)
    fam = parse_family(args.family)
    if args.n_max is not None:
        prof = sep.cyclic_profile(B, args.n_max, fam, args.max_index)
        _emit(args, sep.profile_csv([prof], _stamp(args)))
        return EXIT_UNREACHED if any(r.measured is UNREACHED for r in prof.rows) else EXIT_OK
    if args.b is None or args.x is None:
        raise UsageError("cyclic needs --b and --x (or --n-max for a profile)")
    b, x = parse_element(B, args.b), parse_element(B, args.x)
    line, code = _value_line(sep.depth_cyclic(B, b, x, fam, args.max_index))
    print(line)
    return code


def cmd_short(args) -> int:
    B = parse_group(args.group)
    prof = sep.short_profile(B, args.n_max, args.radius_cap)
    _emit(args, sep.profile_csv([prof], _stamp(args)))
    return EXIT_OK


def cmd_magnus(args) -> int:
    rank = args.rank
    w1 = parse_word(args.w1, rank)
    if args.w2 is None:
        W = magnus_group(w1.rank)
        print(f"image={W.fmt(magnus_embed(w1))}")
        print(f"identity={str(metabelian_is_identity(w1)).lower()}")
        return EXIT_OK
    w2 = parse_word(args.w2, rank)
    m = max(w1.rank, w2.rank)
    v = metabelian_conjugate(w1, w2)
    print(conj.verdict_line(magnus_group(m), v))
    return EXIT_UNREACHED if isinstance(v, conj.Exhausted) else EXIT_OK


def cmd_witness_nonsep(args) -> int:
    A = parse_group(args.base)
    report = sep.pro_p_nonsep_witness(A, args.b, args.p, args.k_max)
    print(report.text())
    return EXIT_OK if report.confirms_nonseparability else EXIT_UNREACHED


def _bound_for(args, W):
    name = getattr(args, "bound", "auto")
    if name == "none":
        return None
    if name == "auto":
        return sep.thm_c_bound_for(W)
    return sep.make_bound(name)


def cmd_check_bounds(args) -> int:
    W = _wreath(args)
    fam = parse_family(args.family)
    bound = _bound_for(args, W)
    if bound is None:
        raise UsageError(f"no closed-form bound known for {W.label}; pass --bound")
    prof = sep.conj_profile(W, args.n_max, fam, args.max_index, args.workers, bound, args.digit_cap)
    print(f"# {W.label} vs {bound.name} (shape check, constants = 1)")
    for r in prof.rows:
        if r.bound is None:
            continue
        if r.measured is UNREACHED:
            status = "unreached"
        elif r.bound is sep.OVERFLOW:
            status = "ok (bound overflows digit cap)"
        else:
            status = "ok" if r.measured <= r.bound else "VIOLATION"
        shown = r.bound if r.bound is sep.OVERFLOW or r.bound < 10**12 else f"~10^{int(r.bound.bit_length() * math.log10(2))}"
        print(f"n={r.n} measured={r.measured} bound={shown} {status}")
    bad = sep.bound_violations(prof)
    print(f"violations={len(bad)}")
    return EXIT_VIOLATION if bad else EXIT_OK


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def _common(p, group: Optional[str] = None, family=True, index=True):
    if group is not None:
        p.add_argument("--group", default=group, help="group literal")
    if family:
        p.add_argument("--family", default="all", help="all | p<prime>")
    if index:
        p.add_argument("--max-index", type=int, default=sep.DEFAULT_MAX_INDEX)


def _csv_opts(p):
    p.add_argument("--out", help="write CSV here instead of stdout")
    p.add_argument("--no-stamp", action="store_true", help="omit the timestamp header line")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="wreathlab",
        description="Conjugacy and separability computations in wreath products.",
        epilog=GRAMMAR,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    ap.add_argument("--config", help="INI file; keys of [wreathlab] and [<command>] become flag defaults")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("decide", help="decide conjugacy of two elements")
    _common(p, "Z/2 wr Z")
    p.add_argument("--x", required=True)
    p.add_argument("--y", required=True)
    p.add_argument("--radius", type=int, default=4, help="conjugator search radius")
    p.add_argument("--mm", action="store_true", help="run the quotient/conjugator interleaving instead")
    p.set_defaults(fn=cmd_decide, max_index=64)

    p = sub.add_parser("depth", help="conjugacy depth of a non-conjugate pair")
    _common(p, "Z/2 wr Z")
    p.add_argument("--x", required=True)
    p.add_argument("--y", required=True)
    p.set_defaults(fn=cmd_depth)

    p = sub.add_parser("profile", help="conjugacy depth profile as CSV")
    _common(p, "Z/2 wr Z")
    p.add_argument("--n-max", type=int, default=3)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--bound", default="auto", help="auto | none | bound name")
    p.add_argument("--digit-cap", type=int, default=sep.DEFAULT_DIGIT_CAP)
    _csv_opts(p)
    p.set_defaults(fn=cmd_profile)

    p = sub.add_parser("girth", help="residual girth")
    _common(p, "Z")
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--n-max", type=int, help="emit a profile for 0..n-max instead")
    _csv_opts(p)
    p.set_defaults(fn=cmd_girth)

    p = sub.add_parser("cyclic", help="depth of x from <b>, or the cyclic profile")
    _common(p, "Z")
    p.add_argument("--b")
    p.add_argument("--x")
    p.add_argument("--n-max", type=int)
    _csv_opts(p)
    p.set_defaults(fn=cmd_cyclic)

    p = sub.add_parser("short", help="shortest conjugator profile")
    _common(p, "H", family=False, index=False)
    p.add_argument("--n-max", type=int, default=2)
    p.add_argument("--radius-cap", type=int, default=8)
    _csv_opts(p)
    p.set_defaults(fn=cmd_short)

    p = sub.add_parser("magnus", help="free metabelian words through the Magnus embedding")
    p.add_argument("--w1", required=True)
    p.add_argument("--w2")
    p.add_argument("--rank", type=int)
    p.set_defaults(fn=cmd_magnus)

    p = sub.add_parser("witness-nonsep", help="pro-p non-separability witness")
    p.add_argument("--base", default="Z/3")
    p.add_argument("--b", type=int, default=2)
    p.add_argument("--p", type=int, default=3)
    p.add_argument("--k-max", type=int, default=3)
    p.set_defaults(fn=cmd_witness_nonsep)

    p = sub.add_parser("check-bounds", help="compare a measured profile against its closed-form bound")
    _common(p, "Z/2 wr Z")
    p.add_argument("--n-max", type=int, default=3)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--bound", default="auto")
    p.add_argument("--digit-cap", type=int, default=sep.DEFAULT_DIGIT_CAP)
    p.set_defaults(fn=cmd_check_bounds)
    return ap


def _apply_config(ap: argparse.ArgumentParser, path: str, command: str):
    cp = configparser.ConfigParser()
    if not cp.read(path, encoding="utf-8"):
        raise UsageError(f"cannot read config {path!r}")
    sub = next(a for a in ap._actions if isinstance(a, argparse._SubParsersAction)).choices[command]
    known = {a.dest: a for a in sub._actions}
    values = {}
    for section in ("wreathlab", command):
        if cp.has_section(section):
            for key, raw in cp.items(section):
                dest = key.replace("-", "_")
                if dest not in known:
                    continue  # keys for other commands are fine in a shared [wreathlab] section
                action = known[dest]
                if isinstance(action, argparse._StoreTrueAction):
                    values[dest] = cp.getboolean(section, key)
                elif action.type is not None:
                    values[dest] = action.type(raw)
                else:
                    values[dest] = raw
    # required flags satisfied by the config
    for dest in values:
        known[dest].required = False
    sub.set_defaults(**values)


_COMMANDS = ("decide", "depth", "profile", "girth", "cyclic", "short", "magnus", "witness-nonsep", "check-bounds")


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    ap = build_parser()
    # find --config and the command before the full parse, so the config
    # can satisfy flags that are otherwise required
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, rest = pre.parse_known_args(argv)
    command = next((a for a in rest if not a.startswith("-")), None)
    try:
        if known.config and command in _COMMANDS:
            _apply_config(ap, known.config, command)
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    except (UsageError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.fn(args)
    except (UsageError, WreathLabError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        print(GRAMMAR, file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
