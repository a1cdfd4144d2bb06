"""Command-line pipeline driver.

Subcommands compose the full workflow: inspect, project, attitudes,
communities, census, render. Every command that writes files also writes a
manifest (input/output digests plus all parameters) so a run can be verified
and reproduced byte-for-byte. Exit codes: 0 success, 2 validation error,
3 algorithmic failure.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from pathlib import Path

from . import __version__
from .analyze import connected_components, girvan_newman, profile_census, select_threshold
from .errors import AlgorithmError, OpinionNetError, ValidationError
from .ingest import SurveySchema, load_survey
from .normalize import binarize, renormalize, write_normalized_csv
from .project import (
    binarized_agreement_weights,
    exact_agreement_weights,
    project_attitudes,
    project_participants,
    score_weights,
    style_edges,
)
from .rational import as_fraction, format_fraction
from .render import (
    ColorScheme,
    export_edgelist,
    export_graphml,
    fr_layout,
    import_graphml,
    render_bipartite_svg,
    render_svg,
)

MODE_ALIASES = {"exact": "exact_agreement", "score": "score", "binarized": "binarized_agreement"}


def _sha256(path: Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


def _write_json(path: Path, payload: dict) -> None:
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def _write_manifest(prefix: Path, command: str, parameters: dict,
                    inputs: dict, outputs: dict) -> Path:
    """Record digests of inputs/outputs plus parameters; no timestamps, so a
    rerun with identical inputs produces an identical manifest."""
    manifest = {
        "tool": {"name": "opinionnet", "version": __version__},
        "command": command,
        "parameters": parameters,
        "inputs": {k: {"file": Path(v).name, "sha256": _sha256(Path(v))} for k, v in inputs.items()},
        "outputs": {k: {"file": Path(v).name, "sha256": _sha256(Path(v))} for k, v in outputs.items()},
    }
    path = prefix.with_name(prefix.name + ".manifest.json")
    _write_json(path, manifest)
    return path


def _load_inputs(args):
    schema = SurveySchema.from_json(args.schema)
    matrix = load_survey(args.survey, schema, missing_policy=args.missing_policy)
    return schema, matrix


def _scale_summary(schema: SurveySchema) -> str:
    counts: dict[int, int] = {}
    for item in schema.items:
        counts[item.scale_size] = counts.get(item.scale_size, 0) + 1
    return ", ".join(f"{n}×{k}pt" for k, n in counts.items())


def cmd_inspect(args) -> int:
    schema, matrix = _load_inputs(args)
    if args.dump_normalized:
        write_normalized_csv(renormalize(matrix), args.dump_normalized)
    report = matrix.report
    summary = {
        "n_participants": matrix.n_participants,
        "n_items": matrix.n_items,
        "scales": _scale_summary(schema),
        "scale_sizes": list(schema.scale_sizes),
        "rows_read": report.rows_read,
        "rows_dropped": report.rows_dropped,
        "missing_cells": report.missing_cells,
        "missing_policy": args.missing_policy,
        "attribute_columns": list(schema.attribute_columns),
    }
    if args.json:
        print(json.dumps(summary, indent=2, sort_keys=True))
    else:
        print(f"N={summary['n_participants']}, m={summary['n_items']}, scales: {summary['scales']}")
        print(f"rows read: {report.rows_read}, dropped: {report.rows_dropped}, "
              f"missing cells: {report.missing_cells}")
        if schema.attribute_columns:
            print(f"attributes: {', '.join(schema.attribute_columns)}")
    return 0


def _weights_for_mode(args, matrix):
    mode = MODE_ALIASES[args.mode]
    if mode == "exact_agreement":
        return exact_agreement_weights(matrix)
    normalized = renormalize(matrix)
    if mode == "score":
        return score_weights(normalized, rescale_to_full=args.rescale)
    return binarized_agreement_weights(binarize(normalized),
                                       count_neutral_pairs=not args.exclude_neutral_pairs)


def cmd_project(args) -> int:
    _, matrix = _load_inputs(args)
    weights = _weights_for_mode(args, matrix)
    prefix = Path(args.out_prefix)
    prefix.parent.mkdir(parents=True, exist_ok=True)

    outputs = {}
    parameters = {
        "mode": args.mode,
        "missing_policy": args.missing_policy,
        "threshold": args.threshold,
        "negative_threshold": args.negative_threshold,
        "rescale": args.rescale,
        "exclude_neutral_pairs": args.exclude_neutral_pairs,
    }
    if args.threshold == "auto":
        selection = select_threshold(
            weights,
            target_fraction=as_fraction(args.target_fraction),
            min_level=None if args.min_level is None else as_fraction(args.min_level),
        )
        threshold = selection.chosen_threshold
        parameters["target_fraction"] = args.target_fraction
        parameters["min_level"] = args.min_level
        parameters["resolved_threshold"] = format_fraction(threshold)
        sweep_path = prefix.with_name(prefix.name + ".sweep.csv")
        rows = ["threshold,giant_fraction,giant_fraction_decimal"]
        rows += [
            f"{format_fraction(level)},{format_fraction(frac)},{repr(float(frac))}"
            for level, frac in selection.sweep
        ]
        sweep_path.write_text("\n".join(rows) + "\n", encoding="utf-8")
        outputs["sweep"] = sweep_path
        print(f"auto threshold: {format_fraction(threshold)} "
              f"(giant fraction {format_fraction(selection.giant_fraction_at_chosen)})")
    else:
        threshold = as_fraction(args.threshold)
        parameters["resolved_threshold"] = format_fraction(threshold)

    negative = None if args.negative_threshold is None else as_fraction(args.negative_threshold)
    graph = project_participants(
        weights,
        threshold,
        negative_threshold=negative,
        node_attrs=matrix.node_attributes(),
        threads=args.threads,
    )
    graphml_path = prefix.with_name(prefix.name + ".graphml")
    edges_path = prefix.with_name(prefix.name + ".edges.csv")
    export_graphml(graph, graphml_path)
    export_edgelist(graph, edges_path)
    outputs["graphml"] = graphml_path
    outputs["edges"] = edges_path
    manifest = _write_manifest(prefix, "project", parameters,
                               {"survey": args.survey, "schema": args.schema}, outputs)
    components = connected_components(graph)
    print(f"projected {graph.n_nodes} participants: {len(graph.positive_edges())} positive / "
          f"{len(graph.negative_edges())} negative edges at threshold {format_fraction(threshold)}")
    print(f"largest component: {format_fraction(components.giant_fraction)} of nodes")
    print(f"wrote {graphml_path}, {edges_path}, {manifest}")
    return 0


def cmd_attitudes(args) -> int:
    _, matrix = _load_inputs(args)
    normalized = renormalize(matrix)
    graph = style_edges(project_attitudes(normalized), mode=args.attitude_mode)
    prefix = Path(args.out_prefix)
    prefix.parent.mkdir(parents=True, exist_ok=True)
    graphml_path = prefix.with_name(prefix.name + ".graphml")
    edges_path = prefix.with_name(prefix.name + ".edges.csv")
    export_graphml(graph, graphml_path)
    export_edgelist(graph, edges_path)
    manifest = _write_manifest(
        prefix, "attitudes",
        {"attitude_mode": args.attitude_mode, "missing_policy": args.missing_policy},
        {"survey": args.survey, "schema": args.schema},
        {"graphml": graphml_path, "edges": edges_path},
    )
    print(f"attitude graph over {graph.n_nodes} items: {len(graph.positive_edges())} positive / "
          f"{len(graph.negative_edges())} negative edges")
    print(f"wrote {graphml_path}, {edges_path}, {manifest}")
    return 0


def cmd_communities(args) -> int:
    graph = import_graphml(args.graph)
    report = girvan_newman(
        graph,
        target_components=args.target,
        max_removed_fraction=as_fraction(args.max_removed_fraction),
    )
    prefix = Path(args.out_prefix)
    prefix.parent.mkdir(parents=True, exist_ok=True)
    report_path = prefix.with_name(prefix.name + ".communities.json")
    _write_json(report_path, report.to_dict())
    manifest = _write_manifest(
        prefix, "communities",
        {"target": args.target, "max_removed_fraction": args.max_removed_fraction},
        {"graph": args.graph},
        {"report": report_path},
    )
    sizes = [len(c) for c in report.final_components]
    print(f"status: {report.status}")
    print(f"removed {len(report.removed_edges)} of {report.original_edge_count} edges "
          f"({format_fraction(report.removed_fraction)})")
    print(f"component sizes: {sizes[:10]}{' ...' if len(sizes) > 10 else ''}")
    shown = report.history[:10]
    if shown:
        print("step  removed edge                        betweenness  components")
        for i, step in enumerate(shown, start=1):
            edge = f"{step.edge[0]} -- {step.edge[1]}"
            comps = ",".join(str(s) for s in step.component_sizes[:6])
            print(f"{i:>4}  {edge:<35} {step.betweenness:>11.2f}  {comps}")
        if len(report.history) > len(shown):
            print(f"      ... {len(report.history) - len(shown)} more removals in {report_path}")
    print(f"wrote {report_path}, {manifest}")
    if report.status == "budget_exhausted":
        return AlgorithmError.exit_code
    return 0


def cmd_census(args) -> int:
    _, matrix = _load_inputs(args)
    signs = binarize(renormalize(matrix))
    census = profile_census(signs)
    prefix = Path(args.out_prefix)
    prefix.parent.mkdir(parents=True, exist_ok=True)
    census_path = prefix.with_name(prefix.name + ".census.json")
    _write_json(census_path, census.to_dict())
    manifest = _write_manifest(
        prefix, "census", {"missing_policy": args.missing_policy},
        {"survey": args.survey, "schema": args.schema},
        {"census": census_path},
    )
    space = 3 ** census.m_binary if census.has_neutral_or_missing else 2 ** census.m_binary
    print(f"profiles realized: {census.realized_profiles}/{space} "
          f"({float(census.realized_fraction):.4f})")
    print(f"wrote {census_path}, {manifest}")
    return 0


def _parse_color_map(arg: str | None) -> dict:
    if not arg:
        return {}
    mapping = {}
    for part in arg.split(","):
        if "=" not in part:
            raise ValidationError(f"bad color mapping entry {part!r}; expected VALUE=COLOR")
        value, color = part.split("=", 1)
        mapping[value.strip()] = color.strip()
    return mapping


def cmd_render(args) -> int:
    prefix = Path(args.out_prefix)
    prefix.parent.mkdir(parents=True, exist_ok=True)
    svg_path = prefix.with_name(prefix.name + ".svg")
    if args.bipartite:
        if not (args.survey and args.schema):
            raise ValidationError("--bipartite rendering needs --survey and --schema")
        _, matrix = _load_inputs(args)
        render_bipartite_svg(renormalize(matrix), svg_path)
        inputs = {"survey": args.survey, "schema": args.schema}
        parameters = {"bipartite": True, "missing_policy": args.missing_policy}
    else:
        if not args.graph:
            raise ValidationError("render needs --graph FILE (or --bipartite with survey+schema)")
        graph = import_graphml(args.graph)
        layout = fr_layout(graph, seed=args.seed, iterations=args.iterations)
        scheme = ColorScheme(
            attribute=args.color_attr,
            mapping=_parse_color_map(args.color_map),
            default_color=args.default_color,
        )
        render_svg(graph, layout, scheme, svg_path)
        inputs = {"graph": args.graph}
        parameters = {
            "bipartite": False,
            "seed": args.seed,
            "iterations": args.iterations,
            "color_attr": args.color_attr,
            "color_map": args.color_map,
            "default_color": args.default_color,
        }
    manifest = _write_manifest(prefix, "render", parameters, inputs, {"svg": svg_path})
    print(f"wrote {svg_path}, {manifest}")
    return 0


def _add_survey_args(sub):
    sub.add_argument("--survey", required=True, help="survey CSV file")
    sub.add_argument("--schema", required=True, help="schema JSON file")
    sub.add_argument("--missing-policy", dest="missing_policy",
                     choices=["drop_participant", "keep_pairwise"],
                     default="drop_participant")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="opinionnet",
        description="Opinion-based group structure from ordinal survey data",
    )
    parser.add_argument("--version", action="version", version=f"opinionnet {__version__}")
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("inspect", help="summarize a survey file against its schema")
    _add_survey_args(p)
    p.add_argument("--json", action="store_true", help="print the summary as JSON")
    p.add_argument("--dump-normalized", dest="dump_normalized", default=None,
                   help="also write normalized values (exact fractions) to this CSV")
    p.set_defaults(func=cmd_inspect)

    p = subs.add_parser("project", help="project participants into an agreement graph")
    _add_survey_args(p)
    p.add_argument("--mode", choices=sorted(MODE_ALIASES), required=True)
    p.add_argument("--threshold", required=True,
                   help="agreement threshold as a decimal or fraction (e.g. 11.5 or 23/2), "
                        "or 'auto' to pick the highest level forming a giant component")
    p.add_argument("--target-fraction", dest="target_fraction", default="1/2",
                   help="giant-component target for --threshold auto (default 1/2)")
    p.add_argument("--min-level", dest="min_level", default=None,
                   help="lowest level the auto sweep may descend to")
    p.add_argument("--negative-threshold", dest="negative_threshold", default=None,
                   help="add disagreement edges for weights at or below this value")
    p.add_argument("--rescale", action="store_true",
                   help="score mode with pairwise missing data: stretch scores back to the "
                        "full range (weight * m / co_answered)")
    p.add_argument("--exclude-neutral-pairs", dest="exclude_neutral_pairs", action="store_true",
                   help="binarized mode: do not count two neutral answers as agreement")
    p.add_argument("--threads", type=int, default=None,
                   help="worker threads for the pair scan (wall time only; "
                        "defaults to OPINIONNET_THREADS or 1)")
    p.add_argument("--out-prefix", dest="out_prefix", required=True)
    p.set_defaults(func=cmd_project)

    p = subs.add_parser("attitudes", help="project items into a co-endorsement graph")
    _add_survey_args(p)
    p.add_argument("--attitude-mode", dest="attitude_mode", choices=["dual", "signed"],
                   default="dual")
    p.add_argument("--out-prefix", dest="out_prefix", required=True)
    p.set_defaults(func=cmd_attitudes)

    p = subs.add_parser("communities", help="split a projected graph by edge betweenness")
    p.add_argument("--graph", required=True, help="GraphML file from 'project'")
    p.add_argument("--target", type=int, default=2, help="component count to reach (default 2)")
    p.add_argument("--max-removed-fraction", dest="max_removed_fraction", default="1",
                   help="removal budget as a fraction of the edge count (default 1)")
    p.add_argument("--out-prefix", dest="out_prefix", required=True)
    p.set_defaults(func=cmd_communities)

    p = subs.add_parser("census", help="tally binarized response profiles")
    _add_survey_args(p)
    p.add_argument("--out-prefix", dest="out_prefix", required=True)
    p.set_defaults(func=cmd_census)

    p = subs.add_parser("render", help="render a graph (or the raw bipartite survey) to SVG")
    p.add_argument("--graph", default=None, help="GraphML file to lay out and draw")
    p.add_argument("--survey", default=None)
    p.add_argument("--schema", default=None)
    p.add_argument("--missing-policy", dest="missing_policy",
                   choices=["drop_participant", "keep_pairwise"], default="drop_participant")
    p.add_argument("--bipartite", action="store_true",
                   help="draw the two-layer participant-item graph directly")
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--iterations", type=int, default=500)
    p.add_argument("--color-attr", dest="color_attr", default=None,
                   help="node attribute to color by")
    p.add_argument("--color-map", dest="color_map", default=None,
                   help="comma-separated VALUE=COLOR pairs, e.g. 'D=#1f77b4,R=#d62728'")
    p.add_argument("--default-color", dest="default_color", default="#999999",
                   help="fill for unmapped values (empty string to make them an error)")
    p.add_argument("--out-prefix", dest="out_prefix", required=True)
    p.set_defaults(func=cmd_render)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "default_color", None) == "":
        args.default_color = None
    try:
        return args.func(args)
    except OpinionNetError as exc:
        block = {"error": {"type": type(exc).__name__, "message": str(exc),
                           "exit_code": exc.exit_code}}
        sweep = getattr(exc, "sweep", None)
        if sweep is not None:
            block["error"]["sweep"] = [
                {"threshold": format_fraction(level), "giant_fraction": format_fraction(frac)}
                for level, frac in sweep
            ]
        sys.stderr.write(json.dumps(block, sort_keys=True) + "\n")
        return exc.exit_code


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
