"""Command-line interface.

Commands:

  enumerate   family members d <= dmax for a query, with verified witnesses
  member      membership of a single d, reported per admissible mu
  witness     like member, plus orbit/push details and descending chains
  pell        fundamental unit and class representatives of u^2 - d*w^2 = N
  hilbert     degree-2 values q(h1), b(h1, H) for supplied witness data
  selfcheck   seeded property suites over all modules

Exit codes: 0 success, 1 internal verification failure, 2 usage error,
3 mathematically valid rejection (square d, no admissible mu, non-member).

Knob defaults may come from flags, K3W_* environment variables, or a
key=value configuration file (--config); flags win over the environment,
which wins over the file.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import Optional

from .errors import (
    DegenerateQuery,
    K3WitnessError,
    NoValidMu,
    SquareDiscriminant,
    SquareInput,
    ThresholdUnreachable,
)
from .families import (
    FamilyQuery,
    Witness,
    enumerate_family,
    member,
    membership,
    witness_chain,
)
from .hilbert import bb_pair_with_H, bb_square, hilbert_class
from .lattice import divisor, dot_H, inner, make_lattice
from .pell import fundamental_unit, solve_bounded
from . import selfcheck

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2
EXIT_REJECTED = 3

_KNOBS = {
    "search_depth": (int, "K3W_SEARCH_DEPTH"),
    "x_threshold": (int, "K3W_X_THRESHOLD"),
    "xy_bound": (int, "K3W_XY_BOUND"),
    "fmt": (str, "K3W_FORMAT"),
    "out": (str, "K3W_OUT"),
    "seed": (int, "K3W_SEED"),
    "iterations": (int, "K3W_ITERATIONS"),
}


def _load_config_file(path: str) -> dict[str, str]:
    values: dict[str, str] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ValueError(f"bad config line: {line!r}")
            key, _, val = line.partition("=")
            values[key.strip()] = val.strip()
    return values


def _resolve_knob(args, name: str, default=None):
    cast, env_key = _KNOBS[name]
    flag = getattr(args, name, None)
    if flag is not None:
        return flag
    if env_key in os.environ:
        return cast(os.environ[env_key])
    cfg = getattr(args, "_config_values", {})
    if name in cfg:
        return cast(cfg[name])
    return default


def _sign_word(sign: int) -> str:
    return "plus" if sign == 1 else "minus"


def _query_from_args(args, sign: int) -> FamilyQuery:
    return FamilyQuery(args.g, args.r, args.s, sign, getattr(args, "tilde", False))


def witness_dict(w: Witness, query: FamilyQuery) -> dict:
    """Flat, JSON-ready view of a witness with every compared integer."""
    rep = w.report
    h1 = hilbert_class(w.F, query.length)
    return {
        "d": w.d,
        "mu": w.mu,
        "sign": _sign_word(w.sign),
        "x": w.x,
        "y": w.y,
        "D": {"x": w.D.x, "y": w.D.y},
        "F": {"x": w.F.x, "y": w.F.y},
        "F2": inner(w.F, w.F),
        "FdotH": dot_H(w.F),
        "DdotH": dot_H(w.D),
        "pell_residual": rep["pell_residual"].actual,
        "bb": {"eps": h1.eps, "q": bb_square(h1), "b": bb_pair_with_H(h1)},
        "checks": rep.flags(),
        "seed": {"x": w.seed[0], "y": w.seed[1]},
        "x_threshold": w.x_threshold,
        "threshold_reachable": w.threshold_reachable,
    }


def _witness_query(args, w: Witness) -> FamilyQuery:
    return FamilyQuery(args.g, args.r, args.s, w.sign, getattr(args, "tilde", False))


def _document(args, sign_word: str, witnesses: list[Witness], lattice=None) -> dict:
    return {
        "query": {
            "g": args.g,
            "r": args.r,
            "s": args.s,
            "sign": sign_word,
            "tilde": bool(getattr(args, "tilde", False)),
        },
        "lattice": lattice,
        "witnesses": [witness_dict(w, _witness_query(args, w)) for w in witnesses],
    }


_CSV_FIELDS = [
    "d",
    "mu",
    "sign",
    "x",
    "y",
    "D_x",
    "D_y",
    "F_x",
    "F_y",
    "F2",
    "FdotH",
    "DdotH",
    "pell_residual",
    "bb_eps",
    "bb_q",
    "bb_b",
    "x_threshold",
    "threshold_reachable",
    "checks_ok",
]


def _csv_rows(args, witnesses: list[Witness]) -> str:
    lines = [",".join(_CSV_FIELDS)]
    for w in witnesses:
        d = witness_dict(w, _witness_query(args, w))
        row = [
            d["d"], d["mu"], d["sign"], d["x"], d["y"],
            d["D"]["x"], d["D"]["y"], d["F"]["x"], d["F"]["y"],
            d["F2"], d["FdotH"], d["DdotH"], d["pell_residual"],
            d["bb"]["eps"], d["bb"]["q"], d["bb"]["b"],
            d["x_threshold"], d["threshold_reachable"],
            all(d["checks"].values()),
        ]
        lines.append(",".join(str(v) for v in row))
    return "\n".join(lines) + "\n"


def _table(args, witnesses: list[Witness]) -> str:
    header = f"{'d':>6} {'mu':>4} {'sign':>5} {'x':>12} {'y':>10} {'F^2':>6} {'F.H':>12} {'D.H':>12} {'q':>6}  checks"
    lines = [header, "-" * len(header)]
    for w in witnesses:
        d = witness_dict(w, _witness_query(args, w))
        ok = "ok" if all(d["checks"].values()) else "FLAG:" + ",".join(
            k for k, v in d["checks"].items() if not v
        )
        lines.append(
            f"{d['d']:>6} {d['mu']:>4} {d['sign']:>5} {_trim(d['x']):>12} {_trim(d['y']):>10} "
            f"{d['F2']:>6} {_trim(d['FdotH']):>12} {_trim(d['DdotH']):>12} {d['bb']['q']:>6}  {ok}"
        )
    return "\n".join(lines) + "\n"


def _trim(n: int) -> str:
    s = str(n)
    return s if len(s) <= 12 else s[:4] + ".." + s[-4:] + f"({len(s)}d)"


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _render(args, witnesses: list[Witness], sign_word: str, lattice=None) -> None:
    fmt = _resolve_knob(args, "fmt", "table")
    out = _resolve_knob(args, "out", None)
    if fmt == "json":
        doc = _document(args, sign_word, witnesses, lattice)
        _emit(json.dumps(doc, indent=2, sort_keys=True) + "\n", out)
    elif fmt == "csv":
        _emit(_csv_rows(args, witnesses), out)
    else:
        _emit(_table(args, witnesses), out)


def cmd_enumerate(args) -> int:
    if args.dmax < 1:
        print("error: --dmax must be >= 1", file=sys.stderr)
        return EXIT_USAGE
    signs = [1, -1] if args.sign == "both" else [1 if args.sign == "plus" else -1]
    depth = _resolve_knob(args, "search_depth", 64)
    thr = _resolve_knob(args, "x_threshold", None)
    witnesses: list[Witness] = []
    try:
        for sign in signs:
            q = _query_from_args(args, sign)
            witnesses.extend(
                enumerate_family(q, args.dmax, x_threshold=thr, search_depth=depth)
            )
    except DegenerateQuery as exc:
        print(f"rejected: {exc}", file=sys.stderr)
        return EXIT_REJECTED
    witnesses.sort(key=lambda w: (w.d, 0 if w.sign == 1 else 1, w.mu))
    for w in witnesses:
        if not w.report.core_passed:
            print(f"internal check failure at d={w.d}: {w.report.failed}", file=sys.stderr)
            return EXIT_CHECK_FAILED
    _render(args, witnesses, args.sign)
    return EXIT_OK


def cmd_member(args) -> int:
    sign = 1 if args.sign == "plus" else -1
    q = _query_from_args(args, sign)
    depth = _resolve_knob(args, "search_depth", 64)
    thr = _resolve_knob(args, "x_threshold", None)
    try:
        outcomes = membership(q, args.d, x_threshold=thr, search_depth=depth)
    except SquareDiscriminant as exc:
        print(f"square discriminant: {exc}", file=sys.stderr)
        return EXIT_REJECTED
    except (NoValidMu, DegenerateQuery) as exc:
        print(f"rejected: {exc}", file=sys.stderr)
        return EXIT_REJECTED
    chosen = None
    for oc in outcomes:
        state = "member" if oc.found else f"empty (period {oc.residue_period} scanned)"
        print(f"mu={oc.mu}: {state}", file=sys.stderr)
        if oc.witness and (chosen is None or (oc.witness.threshold_reachable and not chosen.threshold_reachable)):
            chosen = oc.witness
    if chosen is None:
        print(f"d={args.d} is not a member for any admissible mu", file=sys.stderr)
        return EXIT_REJECTED
    if not chosen.report.core_passed:
        print(f"internal check failure: {chosen.report.failed}", file=sys.stderr)
        return EXIT_CHECK_FAILED
    _render(args, [chosen], args.sign, lattice={"d": chosen.d, "mu": chosen.mu})
    return EXIT_OK


def cmd_witness(args) -> int:
    sign = 1 if args.sign == "plus" else -1
    q = _query_from_args(args, sign)
    depth = _resolve_knob(args, "search_depth", 64)
    thr = _resolve_knob(args, "x_threshold", None)
    try:
        if args.count > 1:
            chain = witness_chain(q, args.d, args.count, x_threshold=thr, search_depth=depth)
        else:
            w = member(q, args.d, x_threshold=thr, search_depth=depth)
            if w is None:
                print(f"d={args.d} is not a member", file=sys.stderr)
                return EXIT_REJECTED
            chain = [w]
    except SquareDiscriminant as exc:
        print(f"square discriminant: {exc}", file=sys.stderr)
        return EXIT_REJECTED
    except (NoValidMu, DegenerateQuery, ThresholdUnreachable) as exc:
        print(f"rejected: {exc}", file=sys.stderr)
        return EXIT_REJECTED
    for w in chain:
        if not w.report.core_passed:
            print(f"internal check failure: {w.report.failed}", file=sys.stderr)
            return EXIT_CHECK_FAILED
        print(
            f"seed (x0,y0)={w.seed} -> witness (x,y)=({w.x},{w.y}) "
            f"threshold {w.x_threshold} reachable={w.threshold_reachable}",
            file=sys.stderr,
        )
    _render(args, chain, args.sign, lattice={"d": chain[0].d, "mu": chain[0].mu})
    return EXIT_OK


def cmd_pell(args) -> int:
    if args.n == 0:
        print("error: --n must be nonzero", file=sys.stderr)
        return EXIT_USAGE
    try:
        unit = fundamental_unit(args.d)
        reps = solve_bounded(args.d, args.n)
    except SquareInput as exc:
        print(f"square input: {exc}", file=sys.stderr)
        return EXIT_REJECTED
    out = _resolve_knob(args, "out", None)
    fmt = _resolve_knob(args, "fmt", "table")
    if fmt == "json":
        doc = {
            "d": args.d,
            "n": args.n,
            "fundamental_unit": {"u0": unit.u0, "w0": unit.w0},
            "representatives": [{"u": r.u, "w": r.w} for r in reps],
        }
        _emit(json.dumps(doc, indent=2, sort_keys=True) + "\n", out)
    else:
        lines = [f"fundamental unit: ({unit.u0}, {unit.w0})"]
        lines.append(f"class representatives of u^2 - {args.d}w^2 = {args.n} (window):")
        lines.extend(f"  ({r.u}, {r.w})" for r in reps)
        _emit("\n".join(lines) + "\n", out)
    return EXIT_OK


def cmd_hilbert(args) -> int:
    sign = 1 if args.sign == "plus" else -1
    q = _query_from_args(args, sign)
    try:
        cfg = make_lattice(args.g, args.d, args.mu)
        D = divisor(cfg, args.x, args.y)
    except K3WitnessError as exc:
        print(f"rejected: {exc}", file=sys.stderr)
        return EXIT_REJECTED
    rr = q.twist_rank
    F = cfg.H + rr * D
    n = q.length
    h1 = hilbert_class(F, n)
    qv, bv = bb_square(h1), bb_pair_with_H(h1)
    target = sign * 2 * rr
    ok = qv == target and (bv - rr * cfg.mu * args.y) % cfg.h_square == 0
    doc = {
        "F": {"x": F.x, "y": F.y},
        "n": n,
        "eps": h1.eps,
        "q": qv,
        "q_target": target,
        "b_with_H": bv,
        "b_residue": (bv - rr * cfg.mu * args.y) % cfg.h_square,
        "corollary_ok": ok,
    }
    fmt = _resolve_knob(args, "fmt", "table")
    out = _resolve_knob(args, "out", None)
    if fmt == "json":
        _emit(json.dumps(doc, indent=2, sort_keys=True) + "\n", out)
    else:
        _emit(
            "\n".join(f"{k}: {v}" for k, v in doc.items()) + "\n",
            out,
        )
    return EXIT_OK if ok else EXIT_CHECK_FAILED


def cmd_selfcheck(args) -> int:
    seed = _resolve_knob(args, "seed", 20240901)
    iterations = _resolve_knob(args, "iterations", 200)
    xy_bound = _resolve_knob(args, "xy_bound", 500)
    inject = os.environ.get("K3W_INJECT_FAULT", "") not in ("", "0")
    results = selfcheck.run_all(
        seed=seed, iterations=iterations, xy_bound=xy_bound, inject_fault=inject
    )
    failed = 0
    for name, ok, detail in results:
        print(f"{'PASS' if ok else 'FAIL'} {name}: {detail}")
        if not ok:
            failed += 1
    print(f"{len(results) - failed}/{len(results)} suites passed")
    return EXIT_OK if failed == 0 else EXIT_CHECK_FAILED


def _add_query_flags(p: argparse.ArgumentParser, with_sign_both: bool) -> None:
    p.add_argument("--g", type=int, required=True, help="genus, H^2 = 2g-2")
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--s", type=int, required=True)
    choices = ["plus", "minus"] + (["both"] if with_sign_both else [])
    p.add_argument("--sign", choices=choices, required=True)
    p.add_argument("--tilde", action="store_true", help="swap the roles of r and s")


def _add_knob_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--search-depth", dest="search_depth", type=int, default=None)
    p.add_argument("--x-threshold", dest="x_threshold", type=int, default=None)
    p.add_argument("--format", dest="fmt", choices=["table", "json", "csv"], default=None)
    p.add_argument("--out", dest="out", default=None)
    p.add_argument("--config", dest="config", default=None, help="key=value file")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="k3witness",
        description="Pell-type witness search on rank-2 K3 Picard lattices",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("enumerate", help="family members up to --dmax")
    _add_query_flags(p, with_sign_both=True)
    p.add_argument("--dmax", type=int, required=True)
    _add_knob_flags(p)
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("member", help="membership of a single d")
    _add_query_flags(p, with_sign_both=False)
    p.add_argument("--d", type=int, required=True)
    _add_knob_flags(p)
    p.set_defaults(func=cmd_member)

    p = sub.add_parser("witness", help="membership with orbit details")
    _add_query_flags(p, with_sign_both=False)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--count", type=int, default=1, help="length of descending chain")
    _add_knob_flags(p)
    p.set_defaults(func=cmd_witness)

    p = sub.add_parser("pell", help="fundamental unit and class representatives")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    _add_knob_flags(p)
    p.set_defaults(func=cmd_pell)

    p = sub.add_parser("hilbert", help="degree-2 values for witness data")
    _add_query_flags(p, with_sign_both=False)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--mu", type=int, required=True)
    p.add_argument("--x", type=int, required=True)
    p.add_argument("--y", type=int, required=True)
    _add_knob_flags(p)
    p.set_defaults(func=cmd_hilbert)

    p = sub.add_parser("selfcheck", help="seeded property suites")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--iterations", type=int, default=None)
    p.add_argument("--xy-bound", dest="xy_bound", type=int, default=None)
    _add_knob_flags(p)
    p.set_defaults(func=cmd_selfcheck)

    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    config_path = getattr(args, "config", None)
    try:
        args._config_values = _load_config_file(config_path) if config_path else {}
    except (OSError, ValueError) as exc:
        print(f"error reading config: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def console_main() -> None:
    sys.exit(main())


if __name__ == "__main__":
    console_main()
