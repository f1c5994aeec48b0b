"""Command-line front end: ``combdyn <group> <command> ...``.

Every report is JSON on stdout; ``--dot`` switches to Graphviz output.
Exit codes: 0 pass, 1 counterexample, 2 usage or parse error, 3 cap hit.
"""

from __future__ import annotations

import argparse
import itertools
import json
import random
import sys
from pathlib import Path

from .errors import CombDynError, InvariantViolation, ResourceError
from .markov import SignedMatrix, markov_graph, mat_mul, mat_pow, om_of, trace
from .orders import FORCING_MODELS, EQUAL, LESS, remove_ones, shark_cmp, shark_forced
from .permutation import Permutation, compose, enumerate_cycles, enumerate_permutations, power
from .pwl import least_period_set, least_period_witnesses
from .trees import (
    GraphVertexMap,
    TreeVertexMap,
    dot_certificate,
    nine_vertex_example,
    graph_matrices,
    random_derangement,
    random_tree,
    route_graph,
    tree_graph,
    tree_matrices,
    tree_walk_witnesses,
)
from .walks import closed_walk_classes, count_nonrepetitive_closed, enumerate_closed

EXIT_OK, EXIT_COUNTEREXAMPLE, EXIT_USAGE, EXIT_RESOURCE = 0, 1, 2, 3

BUNDLED = {"fig10.json": nine_vertex_example}


class UsageError(Exception):
    pass


def emit(obj) -> None:
    sys.stdout.write(json.dumps(obj, indent=2, ensure_ascii=False) + "\n")


def _ints(text: str) -> list[int]:
    try:
        return [int(x) for x in text.replace(" ", "").split(",") if x]
    except ValueError:
        raise UsageError(f"expected comma-separated integers, got {text!r}") from None


def read_perm(args) -> Permutation:
    if args.image:
        image = _ints(args.image)
        return Permutation(len(image), tuple(image))
    text = args.cycle
    n = args.n
    if "(" not in text:
        text = f"({text})"
    return Permutation.parse(text, n)


def read_json(path: str) -> dict:
    p = Path(path)
    if not p.exists():
        raise UsageError(f"no such file: {path}")
    try:
        return json.loads(p.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}: invalid JSON ({exc})") from None


def read_tree(path: str) -> TreeVertexMap:
    # bundled fixtures are found by name when no such file exists locally
    if not Path(path).exists() and Path(path).name in BUNDLED:
        return BUNDLED[Path(path).name]()
    try:
        return TreeVertexMap.from_json(read_json(path))
    except (KeyError, TypeError) as exc:
        raise UsageError(f"{path}: malformed tree map ({exc})") from None


def matrix_report(m: SignedMatrix, om: SignedMatrix, kmax: int) -> dict:
    return {
        "M": m.tolist(),
        "OM": om.tolist(),
        "traces_M": [trace(mat_pow(m, k)) for k in range(1, kmax + 1)],
        "traces_OM": [trace(mat_pow(om, k)) for k in range(1, kmax + 1)],
        "nonrepetitive_closed_walks": [count_nonrepetitive_closed(m, k) for k in range(1, kmax + 1)],
    }


# --- perm / pwl ---------------------------------------------------------------


def cmd_perm_analyze(args) -> int:
    theta = read_perm(args)
    g = markov_graph(theta)
    if args.dot:
        sys.stdout.write(g.to_dot())
        return EXIT_OK
    report = {"permutation": theta.to_json(), "cycles": [list(c) for c in theta.cycles()]}
    report.update(matrix_report(g.markov_matrix(), g.oriented_matrix(), args.power))
    report["graph"] = g.to_json()
    emit(report)
    return EXIT_OK


def cmd_perm_walks(args) -> int:
    theta = read_perm(args)
    g = markov_graph(theta)
    sign = {"any": None, "+": 1, "-": -1}[args.sign]
    bases = [args.base] if args.base else range(1, g.vertex_count + 1)
    walks = []
    for b in bases:
        if not 1 <= b <= g.vertex_count:
            raise UsageError(f"base vertex must lie in 1..{g.vertex_count}")
        for w in enumerate_closed(g, b, args.length, sign_filter=sign,
                                  nonrepetitive_only=args.nonrepetitive, cap=args.cap):
            walks.append({"walk": str(w), **w.to_json()})
    emit({"permutation": theta.to_json(), "length": args.length, "count": len(walks), "walks": walks})
    return EXIT_OK


def cmd_pwl_periods(args) -> int:
    theta = read_perm(args)
    found = least_period_witnesses(theta, args.upto, args.cap)
    emit({
        "permutation": theta.to_json(),
        "upto": args.upto,
        "least_periods": sorted(found),
        "witnesses": {str(m): rec.to_json() for m, rec in found.items()},
    })
    return EXIT_OK


# --- orders -------------------------------------------------------------------


def cmd_order_cmp(args) -> int:
    c = shark_cmp(args.m, args.n)
    if c == EQUAL:
        rel = f"{args.m} = {args.n}"
    elif c == LESS:
        rel = f"{args.m} ◁ {args.n}"
    else:
        rel = f"{args.n} ◁ {args.m}"
    emit({"m": args.m, "n": args.n, "relation": rel})
    return EXIT_OK


def cmd_order_forced(args) -> int:
    forced = FORCING_MODELS[args.model](args.n, args.upto)
    emit({"n": args.n, "model": args.model, "upto": args.upto, "forced": sorted(forced)})
    return EXIT_OK


def cmd_order_remove_ones(args) -> int:
    emit({"v": args.v, "sequence": remove_ones(args.v)})
    return EXIT_OK


# --- trees and graphs ---------------------------------------------------------


def cmd_tree_analyze(args) -> int:
    tvm = read_tree(args.file)
    g = tree_graph(tvm)
    if args.dot:
        sys.stdout.write(g.to_dot())
        return EXIT_OK
    m, om = tree_matrices(tvm)
    report = {"map": tvm.to_json(), "routes": [list(r) for r in tvm.routes()]}
    report.update(matrix_report(m, om, args.power))
    report["trace_OM"] = trace(om)
    report["dots"] = dot_certificate(tvm)
    report["graph"] = g.to_json()
    if args.walk_length is not None:
        w = tree_walk_witnesses(tvm, args.walk_length, args.cap)
        report["walk"] = {"length": args.walk_length,
                          "status": "absent" if w is None else "present",
                          "witness": None if w is None else {"walk": str(w), **w.to_json()}}
    emit(report)
    return EXIT_OK


def cmd_graph_analyze(args) -> int:
    try:
        gvm = GraphVertexMap.from_json(read_json(args.file))
    except (KeyError, TypeError) as exc:
        raise UsageError(f"{args.file}: malformed graph map ({exc})") from None
    g = route_graph(len(gvm.edges), gvm.routes)
    if args.dot:
        sys.stdout.write(g.to_dot())
        return EXIT_OK
    m, om = graph_matrices(gvm)
    report = {"v": gvm.v, "edges": [list(e) for e in gvm.edges]}
    report.update(matrix_report(m, om, args.power))
    report["trace_OM"] = trace(om)
    emit(report)
    return EXIT_OK


def cmd_export_dot(args) -> int:
    if args.tree:
        sys.stdout.write(tree_graph(read_tree(args.tree)).to_dot())
    else:
        sys.stdout.write(markov_graph(read_perm(args)).to_dot())
    return EXIT_OK


# --- verification sweeps ------------------------------------------------------


def _verify_trace(args):
    n_checked = 0
    for n in range(2, args.n_max + 1):
        for theta in enumerate_permutations(n):
            om = om_of(theta)
            if all(theta(i) != i for i in range(1, n + 1)):
                n_checked += 1
                if trace(om) != -1:
                    return n_checked, {"permutation": list(theta.image), "trace": trace(om)}
            k = theta.order()
            if om_of(power(theta, k)) != SignedMatrix.identity(n - 1):
                return n_checked, {"permutation": list(theta.image), "order": k}
    return n_checked, None


def _verify_power(args):
    n_checked = 0
    for n in range(2, args.n_max + 1):
        for theta in enumerate_cycles(n):
            om = om_of(theta)
            acc = om
            for k in range(1, args.upto + 1):
                n_checked += 1
                if acc != om_of(power(theta, k)):
                    return n_checked, {"permutation": list(theta.image), "k": k}
                acc = mat_mul(acc, om)
    return n_checked, None


def _verify_product(args):
    n_checked = 0
    for n in range(2, args.n_max + 1):
        perms = list(enumerate_permutations(n))
        oms = [om_of(p) for p in perms]
        for (a, oa), (b, ob) in itertools.product(zip(perms, oms), repeat=2):
            n_checked += 1
            if mat_mul(oa, ob) != om_of(compose(a, b)):
                return n_checked, {"alpha": list(a.image), "beta": list(b.image)}
    return n_checked, None


def _verify_forcing(args):
    n_checked = 0
    for n in range(2, args.n_max + 1):
        want = shark_forced(n, args.upto)
        for theta in enumerate_cycles(n):
            n_checked += 1
            got = least_period_set(theta, args.upto, args.cap)
            if not want <= got:
                return n_checked, {"permutation": list(theta.image), "missing": sorted(want - got)}
    return n_checked, None


def _verify_tree_trace(args):
    rng = random.Random(args.seed)
    for i in range(args.samples):
        v = rng.randint(3, args.n_max)
        tvm = TreeVertexMap(random_tree(v, rng), random_derangement(v, rng))
        _, om = tree_matrices(tvm)
        dots = dot_certificate(tvm)
        if trace(om) != -1 or sum(dots) != v:
            return i + 1, {"map": tvm.to_json(), "trace": trace(om), "dots": dots}
    return args.samples, None


def _verify_walk_counts(args):
    n_checked = 0
    for n in range(2, args.n_max + 1):
        for theta in enumerate_cycles(n):
            g = markov_graph(theta)
            m = g.markov_matrix()
            for k in range(1, args.upto + 1):
                n_checked += 1
                classes = closed_walk_classes(g, k, nonrepetitive_only=True, cap=args.cap)
                if len(classes) != count_nonrepetitive_closed(m, k):
                    return n_checked, {"permutation": list(theta.image), "k": k,
                                       "enumerated": len(classes),
                                       "mobius": count_nonrepetitive_closed(m, k)}
    return n_checked, None


SUITES = {
    "trace": (_verify_trace, 7, 0),
    "power": (_verify_power, 6, 12),
    "product": (_verify_product, 5, 0),
    "forcing": (_verify_forcing, 6, 8),
    "tree-trace": (_verify_tree_trace, 9, 0),
    "walk-counts": (_verify_walk_counts, 5, 6),
}


def cmd_verify(args) -> int:
    run, n_default, upto_default = SUITES[args.suite]
    args.n_max = n_default if args.n_max is None else args.n_max
    args.upto = upto_default if args.upto is None else args.upto
    checked, bad = run(args)
    report = {"suite": args.suite, "n_max": args.n_max, "checked": checked,
              "status": "pass" if bad is None else "fail"}
    if args.suite in ("power", "forcing", "walk-counts"):
        report["upto"] = args.upto
    if args.suite == "tree-trace":
        report["seed"] = args.seed
    if bad is not None:
        report["counterexample"] = bad
    emit(report)
    return EXIT_OK if bad is None else EXIT_COUNTEREXAMPLE


# --- parser -------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        sys.exit(EXIT_USAGE)


def _positive(text: str) -> int:
    try:
        k = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if k < 1:
        raise argparse.ArgumentTypeError(f"must be positive: {k}")
    return k


def _perm_args(p, required=True):
    grp = p.add_mutually_exclusive_group(required=required)
    grp.add_argument("--cycle", help='one cycle "1,2,3,4" or cycle notation "(1,3)(2,4)"')
    grp.add_argument("--image", help='images of 1..n, e.g. "2,3,4,1"')
    p.add_argument("--n", type=_positive, help="number of points when --cycle leaves some fixed")


def _cap_arg(p):
    p.add_argument("--cap", type=_positive, default=None,
                   help="exploration cap (default: $COMBDYN_CAP or 1000000)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="combdyn", description=__doc__.splitlines()[0])
    groups = parser.add_subparsers(dest="group", required=True, parser_class=_Parser)

    perm = groups.add_parser("perm", help="interval maps given by a permutation").add_subparsers(
        dest="command", required=True, parser_class=_Parser)
    p = perm.add_parser("analyze", help="Markov matrices, traces and walk counts")
    _perm_args(p)
    p.add_argument("--power", type=_positive, default=4, help="largest matrix power reported")
    p.add_argument("--dot", action="store_true", help="print the oriented Markov graph as DOT")
    p.set_defaults(func=cmd_perm_analyze)
    p = perm.add_parser("walks", help="closed walks of a given length")
    _perm_args(p)
    p.add_argument("--length", type=_positive, required=True)
    p.add_argument("--base", type=_positive)
    p.add_argument("--sign", choices=["any", "+", "-"], default="any")
    p.add_argument("--nonrepetitive", action="store_true")
    _cap_arg(p)
    p.set_defaults(func=cmd_perm_walks)

    pwl = groups.add_parser("pwl", help="exact connect-the-dots dynamics").add_subparsers(
        dest="command", required=True, parser_class=_Parser)
    p = pwl.add_parser("periods", help="least periods <= K with exact witnesses")
    _perm_args(p)
    p.add_argument("--upto", type=_positive, required=True)
    _cap_arg(p)
    p.set_defaults(func=cmd_pwl_periods)

    order = groups.add_parser("order", help="forcing orders").add_subparsers(
        dest="command", required=True, parser_class=_Parser)
    p = order.add_parser("cmp", help="compare m and n in the Sharkovsky order")
    p.add_argument("m", type=_positive)
    p.add_argument("n", type=_positive)
    p.set_defaults(func=cmd_order_cmp)
    p = order.add_parser("forced", help="periods forced by n")
    p.add_argument("n", type=_positive)
    p.add_argument("--model", choices=sorted(FORCING_MODELS), default="sharkovsky")
    p.add_argument("--upto", type=_positive, required=True)
    p.set_defaults(func=cmd_order_forced)
    p = order.add_parser("remove-ones", help="clear low bits of v one at a time")
    p.add_argument("v", type=_positive)
    p.set_defaults(func=cmd_order_remove_ones)

    tree = groups.add_parser("tree", help="tree vertex maps").add_subparsers(
        dest="command", required=True, parser_class=_Parser)
    p = tree.add_parser("analyze", help="matrices, trace certificate, walk witnesses")
    p.add_argument("file", help="tree map JSON (fig10.json is bundled)")
    p.add_argument("--walk-length", type=_positive)
    p.add_argument("--power", type=_positive, default=4)
    p.add_argument("--dot", action="store_true")
    _cap_arg(p)
    p.set_defaults(func=cmd_tree_analyze)

    graph = groups.add_parser("graph", help="graph vertex maps with explicit routes").add_subparsers(
        dest="command", required=True, parser_class=_Parser)
    p = graph.add_parser("analyze", help="matrices and traces")
    p.add_argument("file")
    p.add_argument("--power", type=_positive, default=4)
    p.add_argument("--dot", action="store_true")
    p.set_defaults(func=cmd_graph_analyze)

    p = groups.add_parser("verify", help="run an invariant sweep")
    p.add_argument("suite", choices=list(SUITES))
    p.add_argument("--n-max", type=_positive)
    p.add_argument("--upto", type=_positive)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--samples", type=_positive, default=200)
    _cap_arg(p)
    p.set_defaults(func=cmd_verify)

    export = groups.add_parser("export", help="export graphs").add_subparsers(
        dest="command", required=True, parser_class=_Parser)
    p = export.add_parser("dot", help="DOT of a permutation's or a tree map's Markov graph")
    _perm_args(p, required=False)
    p.add_argument("--tree")
    p.set_defaults(func=cmd_export_dot)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "func", None) is cmd_export_dot and not (args.tree or args.cycle or args.image):
        parser.error("export dot needs --cycle, --image or --tree")
    try:
        return args.func(args)
    except ResourceError as exc:
        sys.stderr.write(f"combdyn: {exc}\n")
        return EXIT_RESOURCE
    except InvariantViolation as exc:
        sys.stderr.write(f"combdyn: invariant violated: {exc}\n")
        return EXIT_COUNTEREXAMPLE
    except (UsageError, CombDynError, ValueError) as exc:
        sys.stderr.write(f"combdyn: {exc}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
