"""Command-line entry point ``sgpid``.

Exit codes: 0 on success or an identified query, 2 when the query is not
identified, 1 on any input or validation error.
"""

from __future__ import annotations

import argparse
import json
import sys
from collections.abc import Sequence
from pathlib import Path
from typing import Any, Callable

from pydantic import ValidationError

from .corpus import load_corpus_config, load_corpus_graph, load_corpus_policy
from .estimand import (
    Identified,
    NotIdentified,
    expr_to_json,
    g_formula_cg,
    g_formula_dag,
    id_admg,
    id_sg,
    policy_id_admg,
    policy_id_sg,
    render,
)
from .graph_core import GraphError, GraphKind, MixedGraph, classify, graph_to_dict, load_graph
from .intervention import PolicyError, PolicySet, intervene_graph, load_policy_set, node_intervention
from .projection import latent_project

__all__ = ["main", "build_parser", "ALGORITHMS", "EXIT_OK", "EXIT_ERROR", "EXIT_NOT_IDENTIFIED"]

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_NOT_IDENTIFIED = 2

ALGORITHMS = ("auto", "g-dag", "g-cg", "id-admg", "id-sg", "policy-id-admg", "policy-id-sg")
_CORPUS = "corpus:"


class CliError(Exception):
    """A user-facing error; the message is printed and the exit code is 1."""


# ---------------------------------------------------------------------------
# Input helpers
# ---------------------------------------------------------------------------


def _load_graph(ref: str) -> MixedGraph:
    if ref.startswith(_CORPUS):
        return load_corpus_graph(ref[len(_CORPUS) :])
    return load_graph(ref)


def _load_policy(ref: str) -> PolicySet:
    if ref.startswith(_CORPUS):
        return load_corpus_policy(ref[len(_CORPUS) :])
    return load_policy_set(ref)


def _load_json(ref: str) -> Any:
    if ref.startswith(_CORPUS):
        return load_corpus_config(ref[len(_CORPUS) :])
    with open(ref, encoding="utf-8") as fh:
        return json.load(fh)


def _outcomes(values: Sequence[str]) -> list[str]:
    out = [v.strip() for item in values for v in item.split(",") if v.strip()]
    if not out:
        raise CliError("--y needs at least one outcome")
    return out


def _assignment(items: Sequence[str]) -> dict[str, int]:
    out: dict[str, int] = {}
    for item in items:
        name, sep, value = item.partition("=")
        name = name.strip()
        if not name:
            raise CliError(f"malformed --do {item!r}; expected NAME=VALUE")
        try:
            out[name] = int(value) if sep else 1
        except ValueError as exc:
            raise CliError(f"--do {item!r}: value must be an integer") from exc
    return out


def _validation_message(exc: ValidationError) -> str:
    lines = []
    for err in exc.errors():
        path = ".".join(str(x) for x in err["loc"]) or "<root>"
        lines.append(f"{path}: {err['msg']}")
    return "invalid configuration:\n  " + "\n  ".join(lines)


# ---------------------------------------------------------------------------
# identify
# ---------------------------------------------------------------------------


def _auto(g: MixedGraph, policy: bool) -> str:
    cls = classify(g)
    if policy:
        return "policy-id-admg" if GraphKind.ADMG in cls or GraphKind.CADMG in cls else "policy-id-sg"
    if GraphKind.DAG in cls:
        return "g-dag"
    if GraphKind.CG in cls:
        return "g-cg"
    if GraphKind.ADMG in cls or GraphKind.CADMG in cls:
        return "id-admg"
    return "id-sg"


def _identify(g: MixedGraph, y: list[str], do: dict[str, int], ps: PolicySet | None, algorithm: str):
    if ps is not None and do:
        raise CliError("give either --do or --policy, not both")
    if ps is None and not do:
        raise CliError("an intervention is required: --do NAME=VALUE or --policy FILE")
    if algorithm == "auto":
        algorithm = _auto(g, ps is not None)
    if algorithm.startswith("policy-"):
        policies = ps if ps is not None else node_intervention(do)
        fn = policy_id_admg if algorithm == "policy-id-admg" else policy_id_sg
        return fn(g, y, policies)
    if ps is not None:
        if not ps.all_constant:
            raise CliError(f"algorithm {algorithm} handles node interventions only; the policy file is not constant")
        do = ps.assignment()
    if algorithm == "g-dag":
        return Identified(g_formula_dag(g, do, y))
    if algorithm == "g-cg":
        return Identified(g_formula_cg(g, do, y))
    if algorithm == "id-admg":
        return id_admg(g, y, do)
    return id_sg(g, y, do)


def cmd_identify(args: argparse.Namespace) -> int:
    g = _load_graph(args.graph)
    if g.latent:
        g = latent_project(g)
    y = _outcomes(args.y)
    ps = _load_policy(args.policy) if args.policy else None
    result = _identify(g, y, _assignment(args.do or []), ps, args.algorithm)
    if isinstance(result, NotIdentified):
        district = sorted(result.district)
        if args.format == "json":
            doc = {"identified": False, "district": district, "reason": result.reason, "verified": result.verify()}
            print(json.dumps(doc, indent=2))
        else:
            print(f"not identified: district {{{', '.join(district)}}} cannot be reached by fixing")
            if result.reason:
                print(result.reason)
        return EXIT_NOT_IDENTIFIED
    if args.format == "json":
        doc = {
            "identified": True,
            "text": render(result.expr, "text"),
            "latex": render(result.expr, "latex"),
            "y_star": sorted(result.y_star),
            "expr": expr_to_json(result.expr),
        }
        print(json.dumps(doc, indent=2))
    else:
        print(render(result.expr, args.format))
    return EXIT_OK


# ---------------------------------------------------------------------------
# intervene
# ---------------------------------------------------------------------------


def cmd_intervene(args: argparse.Namespace) -> int:
    g = _load_graph(args.graph)
    ps = _load_policy(args.policy)
    post = intervene_graph(g, ps)
    text = json.dumps(graph_to_dict(post), indent=2) + "\n"
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return EXIT_OK


# ---------------------------------------------------------------------------
# simulate / experiment
# ---------------------------------------------------------------------------


def cmd_simulate(args: argparse.Namespace) -> int:
    from .experiments import SimulationConfig, generate_network, simulate

    raw = _load_json(args.config) if args.config else {}
    if args.seed is not None:
        raw = {**raw, "seed": args.seed}
    cfg = SimulationConfig.model_validate(raw)
    net = generate_network(cfg.network)
    sample = simulate(net, cfg.resolved_params, cfg.n_samples, cfg.seed, cfg.sweeps)
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        sample.to_csv(out / "dataset.csv")
        (out / "network.json").write_text(json.dumps(graph_to_dict(net.graph), indent=2) + "\n", encoding="utf-8")
        print(f"wrote {sample.n} replicates of a {net.n_units}-unit network to {out}")
    else:
        sample.write_csv(sys.stdout)
    return EXIT_OK


def cmd_experiment(args: argparse.Namespace) -> int:
    from .experiments import ExperimentConfig, run_experiment

    raw = _load_json(args.config) if args.config else {}
    raw = {**raw, "kind": raw.get("kind", args.kind)}
    if raw["kind"] != args.kind:
        raise CliError(f"configuration is for the {raw['kind']} experiment, not {args.kind}")
    if args.seed is not None:
        raw["seed"] = args.seed
    cfg = ExperimentConfig.model_validate(raw)
    result = run_experiment(cfg)
    header = "ACE bias" if args.kind == "bias" else "improvement"
    print(f"{'generator':<16} {'density':>7} {header:>12} {'95% CI':>24}  excludes 0")
    for r in result.rows:
        ci = f"[{r.ci_low:+.4f}, {r.ci_high:+.4f}]"
        extra = f"  {r.note}" if r.note else ""
        print(f"{r.generator:<16} {r.density:>7.2f} {r.estimate:>+12.4f} {ci:>24}  {str(r.excludes_zero).lower()}{extra}")
    if args.out:
        for p in result.write(args.out):
            print(f"wrote {p}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    """Usage errors exit with 1 so that 2 keeps meaning "not identified"."""

    def error(self, message: str):  # type: ignore[override]
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="sgpid",
        description="Identification of node and policy interventions in segregated graphs.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    ident = sub.add_parser("identify", help="derive an estimand or a non-identification witness")
    ident.add_argument("--graph", required=True, help="graph JSON file, or corpus:NAME")
    ident.add_argument("--y", action="append", required=True, help="outcome(s), repeatable or comma separated")
    ident.add_argument("--do", action="append", metavar="NAME=VALUE", help="node intervention, repeatable")
    ident.add_argument("--policy", help="policy set JSON file, or corpus:NAME")
    ident.add_argument("--algorithm", choices=ALGORITHMS, default="auto")
    ident.add_argument("--format", choices=("text", "latex", "json"), default="text")
    ident.set_defaults(func=cmd_identify)

    inter = sub.add_parser("intervene", help="print the post-intervention graph")
    inter.add_argument("--graph", required=True)
    inter.add_argument("--policy", required=True)
    inter.add_argument("--out", help="write the graph JSON here instead of stdout")
    inter.set_defaults(func=cmd_intervene)

    sim = sub.add_parser("simulate", help="draw network replicates as CSV")
    sim.add_argument("--config", help="simulation config JSON, or corpus:NAME")
    sim.add_argument("--seed", type=int)
    sim.add_argument("--out", help="directory for dataset.csv and network.json (default: CSV on stdout)")
    sim.set_defaults(func=cmd_simulate)

    exp = sub.add_parser("experiment", help="run the bias or policy study")
    exp.add_argument("kind", choices=("bias", "policy"))
    exp.add_argument("--config", help="experiment config JSON, or corpus:NAME")
    exp.add_argument("--seed", type=int)
    exp.add_argument("--out", help="directory for the summary CSV, detail JSON and plot data")
    exp.set_defaults(func=cmd_experiment)
    return parser


_HANDLED: tuple[type[BaseException], ...] = (
    CliError,
    GraphError,
    PolicyError,
    KeyError,
    OSError,
    json.JSONDecodeError,
    ValueError,
)


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    func: Callable[[argparse.Namespace], int] = args.func
    try:
        return func(args)
    except ValidationError as exc:
        print(f"error: {_validation_message(exc)}", file=sys.stderr)
    except _HANDLED as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"error: {msg}", file=sys.stderr)
    return EXIT_ERROR


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
