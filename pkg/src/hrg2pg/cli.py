"""Command-line front end.

Every command builds a run report ``{command, inputs, outcome, payload,
elapsed}``; ``--json`` prints it, otherwise a human rendering of the same
data is printed. Exit status: 0 ok, 1 domain negative, 2 usage or I/O.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from . import __version__
from .crosscheck import ambiguity_report, crosscheck
from .errors import FormatError, Hrg2PgError, NormalizationError, NotWellFormedError, TranslationError
from .formats import format_grammar, format_graph, read_file
from .grammar import Hrg, enumerate_graphs, validate_grammar
from .hypergraph import Hypergraph, validate
from .plr import build_table, parse, recognition_ambiguity
from .positional import (
    chain_order,
    format_positional,
    to_json,
    translate_graph,
    translate_grammar,
    translate_production,
)
from .transform import is_well_formed, normalize

EXIT = {"ok": 0, "violation": 1, "conflict": 1, "reject": 1, "error": 1}


class UsageError(Exception):
    pass


def _load(path: str, kind: str = None):
    p = Path(path)
    if not p.exists():
        raise FileNotFoundError(path)
    obj = read_file(p)
    if kind == "grammar" and not isinstance(obj, Hrg):
        raise UsageError(f"{path} is not a grammar file")
    if kind == "graph" and not isinstance(obj, Hypergraph):
        raise UsageError(f"{path} is not a graph file")
    return obj


def _checked_grammar(path: str) -> Hrg:
    g = _load(path, "grammar")
    problems = validate_grammar(g)
    if problems:
        raise _violations(problems)
    return g


class _Negative(Exception):
    def __init__(self, outcome, payload, text):
        super().__init__(text)
        self.outcome, self.payload, self.text = outcome, payload, text


def _violations(problems) -> _Negative:
    lines = [str(v) for v in problems]
    return _Negative("violation", {"error": f"{len(lines)} violation(s)", "violations": lines},
                     "\n".join(lines))


def _table_for(g: Hrg, do_normalize: bool):
    if do_normalize:
        return normalize(g).table or build_table(translate_grammar(g))
    return build_table(translate_grammar(g))


# -- commands ----------------------------------------------------------------


def cmd_validate(args):
    obj = _load(args.file)
    if isinstance(obj, Hrg):
        problems = validate_grammar(obj)
    else:
        labels = _load(args.grammar, "grammar").labels if args.grammar else None
        problems = validate(obj, labels)
    payload = {"kind": "grammar" if isinstance(obj, Hrg) else "graph",
               "violations": [{"kind": v.kind, "subject": v.subject, "message": v.message}
                              for v in problems]}
    text = "\n".join(str(v) for v in problems) if problems else "valid"
    return ("violation" if problems else "ok"), payload, text


def cmd_translate(args):
    obj = _load(args.file)
    if isinstance(obj, Hypergraph):
        problems = validate(obj)
        if problems:
            raise _violations(problems)
        if args.order:
            ps = translate_graph(obj, args.order.split(","))
        else:
            try:
                ps = translate_graph(obj)
            except TranslationError:
                ps = translate_graph(obj, chain_order(obj))
        line = format_positional(ps, human=args.human)
        return "ok", {"string": to_json(ps)}, line
    g = _checked_grammar(args.file)
    lines, items = [], []
    for p in g.productions:
        pp = translate_production(p, g.labels)
        items.append(to_json(pp))
        lines.append(format_positional(pp, human=args.human))
    notes = list(g.notes)
    lines += [f"note: {n}" for n in notes]
    return "ok", {"productions": items, "notes": notes}, "\n".join(lines)


def cmd_wf_check(args):
    g = _checked_grammar(args.file)
    pg = translate_grammar(g)
    rows, lines = [], []
    for pp in pg.productions:
        wf = is_well_formed(pp, g.entering[pp.lhs])
        rows.append({"name": pp.name, "production": format_positional(pp), "well_formed": wf.ok,
                     "diagnostic": wf.diagnostic})
        verdict = "well-formed" if wf.ok else f"NOT well-formed: {wf.diagnostic}"
        lines.append(f"{pp.name}: {format_positional(pp)}  {verdict}")
    ok = all(r["well_formed"] for r in rows)
    return ("ok" if ok else "violation"), {"productions": rows}, "\n".join(lines)


def cmd_normalize(args):
    g = _checked_grammar(args.file)
    try:
        result = normalize(g, max_duplicates=args.max_duplicates, wf_only=args.wf_only)
    except NormalizationError as exc:
        detail = json.dumps(exc.diagnostic, indent=2, ensure_ascii=False)
        outcome = "violation" if "unfixable" in exc.diagnostic else "conflict"
        return outcome, {"error": str(exc), "diagnostic": exc.diagnostic}, f"{exc}\n{detail}"
    text_grammar = format_grammar(result.grammar)
    if args.output:
        Path(args.output).write_text(text_grammar, encoding="utf-8")
    payload = {
        "plan": result.plan.to_json(),
        "positional": [to_json(p) for p in result.positional.productions],
        "grammar": text_grammar,
        "output": args.output,
        "conflicts": len(result.table.conflicts) if result.table else None,
    }
    lines = [result.plan.format(), ""]
    lines += [format_positional(p) for p in result.positional.productions]
    if not args.output:
        lines += ["", text_grammar.rstrip()]
    return "ok", payload, "\n".join(lines)


def cmd_tables(args):
    g = _checked_grammar(args.file)
    table = _table_for(g, args.normalize)
    payload = {"state_count": table.state_count, **table.to_json()}
    return ("conflict" if table.conflicts else "ok"), payload, table.dump()


def cmd_parse(args):
    g = _checked_grammar(args.grammar)
    h = _load(args.graph, "graph")
    problems = validate(h, g.labels)
    if problems:
        raise _violations(problems)
    table = _table_for(g, args.normalize)
    if args.all_starts:
        report = recognition_ambiguity(table, h)
        lines = []
        for r in report.rows:
            verdict = "accept" if r.accepted else f"reject: {r.diagnostic}"
            lines.append(f"start {r.start_edge}: {verdict} (shifts {r.shifts}, reduces {r.reduces})")
        lines.append(f"distinct trees: {report.distinct_trees}, up to rotation: "
                     f"{report.distinct_up_to_rotation}, fetch ambiguities: {report.fetch_ambiguities}")
        ok = report.rows and all(r.accepted for r in report.rows)
        return ("ok" if ok else "reject"), report.to_json(), "\n".join(lines)
    result = parse(table, h, args.start_edge, trace=args.trace)
    lines = list(result.trace)
    if result.accepted:
        lines.append(f"accept from {result.start_edge} (shifts {result.shifts}, reduces {result.reduces})")
        lines.append(result.tree.format())
    else:
        lines.append(f"reject: {result.diagnostic}")
    payload = result.to_json()
    if args.trace:
        payload["trace"] = result.trace
    return ("ok" if result.accepted else "reject"), payload, "\n".join(lines)


def cmd_enumerate(args):
    g = _checked_grammar(args.file)
    enum = enumerate_graphs(g, args.max_edges)
    rows, lines = [], []
    for i, c in enumerate(enum.classes, start=1):
        graph = Hypergraph(c.graph.edges, c.graph.ext, name=f"class{i}")
        rows.append({"class": i, "edges": len(c.graph.edges), "derivations": c.count,
                     "labels": [e.label for e in c.graph.edges], "derivation": list(c.derivation),
                     "graph": format_graph(graph)})
        lines.append(f"# class {i}: {len(c.graph.edges)} edges, {c.count} derivation(s), "
                     f"via {' '.join(c.derivation)}")
        lines.append(format_graph(graph).rstrip())
    lines.append(f"{len(enum.classes)} class(es) with at most {args.max_edges} edges")
    return "ok", {"max_edges": args.max_edges, "classes": rows}, "\n".join(lines)


def cmd_oracle(args):
    g = _checked_grammar(args.file)
    table = _table_for(g, args.normalize)
    graphs = [(path, _load(path, "graph")) for path in args.graphs]
    report = crosscheck(g, table, args.max_edges, args.mutations, args.seed, graphs)
    payload = report.to_json()
    lines = [f"comparisons: {len(report.comparisons)}, agreement: {report.agreement:.0%}"]
    for c in report.comparisons:
        if not c.agree:
            lines.append(f"DISAGREE {c.source}: oracle {c.oracle}, parser {c.parser} {c.diagnostic}")
    if graphs:
        enum = enumerate_graphs(g, max([args.max_edges] + [len(h.edges) for _, h in graphs]))
        payload["ambiguity"] = []
        for path, h in graphs:
            amb = ambiguity_report(g, table, h, enum)
            payload["ambiguity"].append({"graph": path, **amb})
            lines.append(f"{path}: generation ambiguity {amb['generation_ambiguity']} derivation(s); "
                         f"recognition {amb['recognition_trees_up_to_rotation']} tree(s) up to rotation "
                         f"over {len(amb['recognition']['admissible_starts'])} start(s), "
                         f"{amb['recognition']['fetch_ambiguities']} fetch ambiguities")
    return ("ok" if report.ok else "violation"), payload, "\n".join(lines)


# -- wiring ---------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="print the structured run report")
    parser = argparse.ArgumentParser(prog="hrg2pg", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", parents=[common], help="check a grammar or graph file")
    p.add_argument("file")
    p.add_argument("--grammar", help="grammar supplying label types for a graph file")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("translate", parents=[common], help="emit positional productions or strings")
    p.add_argument("file")
    p.add_argument("--human", action="store_true", help="omit z=0 in connectors")
    p.add_argument("--order", help="comma-separated edge ids (graph files)")
    p.set_defaults(func=cmd_translate)

    p = sub.add_parser("wf-check", parents=[common], help="well-formedness per production")
    p.add_argument("file")
    p.set_defaults(func=cmd_wf_check)

    p = sub.add_parser("normalize", parents=[common], help="search a permutation plan")
    p.add_argument("file")
    p.add_argument("--max-duplicates", type=int, default=0)
    p.add_argument("--wf-only", action="store_true", help="ignore table conflicts")
    p.add_argument("-o", "--output", help="write the normalized grammar here")
    p.set_defaults(func=cmd_normalize)

    p = sub.add_parser("tables", parents=[common], help="dump the pLR parse table")
    p.add_argument("file")
    p.add_argument("--normalize", action="store_true", help="normalize the grammar first")
    p.set_defaults(func=cmd_tables)

    p = sub.add_parser("parse", parents=[common], help="parse a graph file")
    p.add_argument("grammar")
    p.add_argument("graph")
    p.add_argument("--start-edge")
    p.add_argument("--all-starts", action="store_true")
    p.add_argument("--trace", action="store_true")
    p.add_argument("--normalize", action="store_true", help="normalize the grammar first")
    p.set_defaults(func=cmd_parse)

    p = sub.add_parser("enumerate", parents=[common], help="derivable graphs up to isomorphism")
    p.add_argument("file")
    p.add_argument("-k", "--max-edges", type=int, default=3)
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("oracle", parents=[common], help="parser vs enumeration membership")
    p.add_argument("file")
    p.add_argument("graphs", nargs="*", help="extra graph files to compare")
    p.add_argument("-k", "--max-edges", type=int, default=5)
    p.add_argument("--mutations", type=int, default=0, help="seeded non-member mutations")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--normalize", action="store_true", help="normalize the grammar first")
    p.set_defaults(func=cmd_oracle)
    return parser


def run(argv=None) -> tuple[int, dict, str, bool]:
    parser = build_parser()
    args, extra = parser.parse_known_args(argv)
    # graph files may follow options: `oracle g.hrg -k 3 h1.hg h2.hg`
    if extra and getattr(args, "command", None) == "oracle" and not any(a.startswith("-") for a in extra):
        args.graphs = list(args.graphs) + extra
    elif extra:
        parser.error(f"unrecognized arguments: {' '.join(extra)}")
    inputs = {k: v for k, v in vars(args).items() if k not in ("func", "json", "command")}
    t0 = time.perf_counter()
    try:
        outcome, payload, text = args.func(args)
        code = EXIT[outcome]
    except _Negative as neg:
        outcome, payload, text, code = neg.outcome, neg.payload, neg.text, 1
    except FileNotFoundError as exc:
        outcome, payload, code = "error", {"error": f"file not found: {exc.args[0] if exc.args else exc}"}, 2
        text = payload["error"]
    except (FormatError, UsageError, OSError) as exc:
        outcome, payload, text, code = "error", {"error": str(exc)}, str(exc), 2
    except (TranslationError, NotWellFormedError) as exc:
        outcome, payload, text, code = "violation", {"error": str(exc)}, str(exc), 1
    except Hrg2PgError as exc:
        outcome, payload, text, code = "error", {"error": str(exc)}, str(exc), 1
    report = {"command": args.command, "inputs": inputs, "outcome": outcome, "payload": payload,
              "elapsed": round(time.perf_counter() - t0, 6)}
    return code, report, text, args.json


def main(argv=None) -> int:
    code, report, text, as_json = run(argv)
    if as_json:
        print(json.dumps(report, indent=2, ensure_ascii=False))
    else:
        stream = sys.stdout if code == 0 or report["outcome"] != "error" else sys.stderr
        print(text, file=stream)
    return code


if __name__ == "__main__":
    sys.exit(main())
