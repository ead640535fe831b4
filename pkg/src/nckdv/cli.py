"""Command-line front end: ``flows``, ``predict``, ``verify`` and ``graphs``.

Exit codes: 0 success, 1 verification failure or inconsistent system,
2 usage error.  Output is deterministic for identical arguments.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import List, Optional, Sequence

from .verify import DEFAULT_SEED, SUITES, run_suite

__all__ = ["main", "run", "build_parser"]

# acceptance criteria 1..7, in order
SUITE_ORDER = ("flows", "classical", "commute", "series", "onepsi", "solver", "graphs")


class UsageError(Exception):
    pass


def _int_list(text: str) -> List[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _positive(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return v


def _nonnegative(text: str) -> int:
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError(f"expected a nonnegative integer, got {text}")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="nckdv", description="Exact ncKdV flows and intersection-number predictions.")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED,
                   help=f"seed for randomized checks (default {DEFAULT_SEED})")
    sub = p.add_subparsers(dest="command", required=True)

    f = sub.add_parser("flows", help="print the flows P_n with du/dt_n = dx P_n")
    f.add_argument("--n", type=_positive, required=True, help="largest flow index")
    f.add_argument("--format", choices=("json", "tsv"), default="json", help="output format (default json)")
    f.add_argument("--eps-max", type=_nonnegative, default=None,
                   help="raise the eps truncation (default 2n+2 per flow)")
    f.add_argument("--depth-floor", type=int, default=None,
                   help="psiDO depth floor (default -(2n+3) per flow)")
    f.add_argument("--modes", type=_int_list, default=None,
                   help="comma-separated Fourier modes; prints the mode components of dx P_n instead")

    q = sub.add_parser("predict", help="solve for the intersection-number table")
    q.add_argument("--gmax", type=_nonnegative, required=True)
    q.add_argument("--nmax", type=_positive, required=True)
    q.add_argument("--mode-bound", type=_nonnegative, required=True)
    q.add_argument("--flows", type=_positive, required=True, help="use flows 1..M")
    q.add_argument("--out", default=None, help="table JSON path (default stdout)")
    q.add_argument("--extra-points", type=_nonnegative, default=0,
                   help="internal auxiliary points beyond --nmax (default 0)")
    q.add_argument("--report", default=None, help="consistency report JSON path (default stderr summary)")

    v = sub.add_parser("verify", help="run the acceptance suites")
    v.add_argument("--suite", choices=SUITE_ORDER + ("all",), default="all")

    g = sub.add_parser("graphs", help="enumerate stable graphs")
    g.add_argument("--genus", type=_nonnegative, required=True)
    g.add_argument("--legs", type=_nonnegative, required=True)
    g.add_argument("--weightings", type=_positive, default=None, metavar="R",
                   help="also count weightings mod R")
    g.add_argument("--a", type=_int_list, default=None, help="leg modes a1,...,an (default all zero)")
    return p


def _cmd_flows(args, out) -> int:
    from .hierarchy import flow
    from .psido import Truncation

    rows = []
    tsv = ["n\teps\tmu\tre\tim\tvars"]
    for n in range(1, args.n + 1):
        t = Truncation.for_flow(n)
        if args.depth_floor is not None:
            if args.depth_floor > 0:
                raise UsageError("--depth-floor must be <= 0")
            t = Truncation(args.depth_floor, t.eps_max, t.max_factors)
        if args.eps_max is not None:
            t = t.with_eps_max(args.eps_max)
        p = flow(n, t)
        if args.modes is not None:
            rows.append({"n": n, "trunc": t.to_json(), "components": _mode_components(p.dx(), args.modes)})
            continue
        rows.append({"n": n, "trunc": t.to_json(), "P": p.to_json()})
        for (e, m, vars), c in p.items():
            j = c.to_json()
            tsv.append(f"{n}\t{e}\t{m}\t{j['re']}\t{j['im']}\t" + " ".join(f"u{k1},{k2}" for k1, k2 in vars))
    if args.format == "tsv" and args.modes is None:
        out.write("\n".join(tsv) + "\n")
    elif args.format == "tsv":
        lines = ["n\ta\teps\tmu\tre\tim\tvars"]
        for r in rows:
            for comp in r["components"]:
                for mono in comp["monomials"]:
                    lines.append(f"{r['n']}\t{comp['total_mode']}\t{mono['eps']}\t{mono['mu']}\t"
                                 f"{mono['coeff']['re']}\t{mono['coeff']['im']}\t"
                                 + " ".join(f"v{a},{k}" for a, k in mono["vars"]))
        out.write("\n".join(lines) + "\n")
    else:
        out.write(json.dumps(rows, indent=1) + "\n")
    return 0


def _mode_components(dp, modes: Sequence[int]) -> list:
    from itertools import product as cartesian

    from .fourier import mode_component

    modes = sorted(set(modes))
    degrees = {len(vars) for _, _, vars in dp.terms}
    targets = sorted({sum(c) for d in degrees for c in cartesian(modes, repeat=d)})
    comps = []
    for a in targets:
        comp = mode_component(dp, a, modes)
        if comp:
            comps.append(comp.to_json())
    return comps


def _cmd_predict(args, out, err) -> int:
    from .tausolver import InconsistentSystem, solve

    try:
        table, report = solve(args.gmax, args.nmax, args.mode_bound, args.flows, args.extra_points)
    except InconsistentSystem as exc:
        err.write(f"inconsistent system: {exc}\n")
        return 1
    text = table.dumps() + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        out.write(text)
    if args.report:
        with open(args.report, "w") as fh:
            fh.write(report.dumps() + "\n")
    else:
        err.write(f"{len(table)} entries, {report.inconsistent} inconsistent, "
                  f"{len(report.undetermined)} undetermined\n")
    return 0


def _cmd_verify(args, out) -> int:
    names = SUITE_ORDER if args.suite == "all" else (args.suite,)
    failed = 0
    for name in names:
        checks = run_suite(name, seed=args.seed)
        ok = all(c.ok for c in checks)
        failed += not ok
        out.write(f"[{name}] {'PASS' if ok else 'FAIL'}\n")
        for c in checks:
            out.write("  " + c.line() + "\n")
        out.flush()
    return 1 if failed else 0


def _cmd_graphs(args, out) -> int:
    from .stablegraphs import dumps, enumerate_graphs

    if 2 * args.genus - 2 + args.legs <= 0:
        raise UsageError("need 2*genus - 2 + legs > 0")
    A = args.a
    if A is not None:
        if len(A) != args.legs:
            raise UsageError(f"--a needs {args.legs} values, got {len(A)}")
        if sum(A) != 0:
            raise UsageError("--a values must sum to 0")
    if A is not None and args.weightings is None:
        raise UsageError("--a is only used together with --weightings")
    out.write(dumps(enumerate_graphs(args.genus, args.legs), A, args.weightings) + "\n")
    return 0


def run(argv: Optional[Sequence[str]] = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if args.command == "flows":
            return _cmd_flows(args, out)
        if args.command == "predict":
            return _cmd_predict(args, out, err)
        if args.command == "verify":
            return _cmd_verify(args, out)
        return _cmd_graphs(args, out)
    except UsageError as exc:
        err.write(f"{parser.prog} {args.command}: error: {exc}\n")
        return 2


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
