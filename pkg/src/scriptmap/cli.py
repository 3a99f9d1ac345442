"""Command line entry points for corpus validation, training, and evaluation.

Subcommands:

  validate        parse corpus files and report documents/scenarios/tokens
  train-identify  fit decision trees that find script-relevant verbs
  identify        apply saved trees; write a corpus with predicted labels
  train-map       fit per-scenario sequence models on ESDs
  map             decode event types for gold script mentions
  tune-epsilon    pick the discretization threshold on held-out ESDs
  evaluate        run the identification / classification / pipeline protocols

Exit codes: 0 success, 1 usage error, 2 data or model format error,
3 numeric failure during optimization. Logs go to stderr; results go to
stdout or the requested output files. `--config FILE` supplies defaults
(JSON object or key=value lines); explicit flags win over the file.
"""

from __future__ import annotations

import argparse
import json
import logging
import random
import sys
from pathlib import Path
from typing import Sequence

from . import corpus as corpus_mod
from . import crf as crf_mod
from . import embeddings as embeddings_mod
from . import evaluation as evaluation_mod
from . import features as features_mod
from . import identify as identify_mod
from .corpus import CorpusFormatError, EsdDocument, Story
from .crf import ModelFormatError, NumericError, TrainConfig
from .embeddings import (
    DEFAULT_EPSILON_GRID,
    DiscretizationConfig,
    EmbeddingFormatError,
    EmbeddingTable,
)
from .identify import TreeConfig, TreeFormatError

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_NUMERIC = 3

INDEPENDENT_TREE_FILE = "independent.tree.json"
MAPPING_CONFIG_FILE = "mapping_config.json"
LOG_LEVELS = ("debug", "info", "warning", "error")


class CliUsageError(Exception):
    """Bad command line or config input; mapped to exit code 1."""


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 on bad flags; the contract here is 1.
    def error(self, message):
        raise CliUsageError(f"{self.prog}: {message}")


def _float_list(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated float list: {text!r}")


def _str_list(text: str) -> list[str]:
    return [x.strip() for x in text.split(",") if x.strip()]


def _load_config_file(path: str) -> dict:
    text = Path(path).read_text(encoding="utf-8")
    if text.lstrip().startswith("{"):
        data = json.loads(text)
        if not isinstance(data, dict):
            raise CliUsageError(f"{path}: config must be a JSON object")
    else:
        data = {}
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise CliUsageError(f"{path}:{lineno}: expected key=value")
            key, _, value = line.partition("=")
            value = value.strip()
            try:
                data[key.strip()] = json.loads(value)
            except json.JSONDecodeError:
                data[key.strip()] = value
    return {str(k).replace("-", "_"): v for k, v in data.items()}


def _merge_config(args: argparse.Namespace):
    """Fill options the user left unset from the config file, then hard defaults."""
    defaults: dict = getattr(args, "defaults", {})
    cfg = _load_config_file(args.config) if getattr(args, "config", None) else {}
    for key in sorted(set(cfg) - set(defaults)):
        logger.warning("config key %r is not used by this command", key)
    for key, hard in defaults.items():
        if getattr(args, key, None) is None:
            setattr(args, key, cfg.get(key, hard))


def _setup_logging(level_name: str):
    logging.basicConfig(
        level=getattr(logging, level_name.upper()),
        stream=sys.stderr,
        format="%(levelname)s %(name)s: %(message)s",
        force=True,
    )


def _parse_docs(path: str, kind: str | None):
    try:
        return corpus_mod.parse_corpus_path(path, kind)
    except CorpusFormatError as exc:
        raise CorpusFormatError(f"{path}: {exc}") from exc


def _parse_stories(path: str) -> list[Story]:
    return list(_parse_docs(path, corpus_mod.KIND_STORY))


def _parse_esds(path: str) -> list[EsdDocument]:
    return list(_parse_docs(path, corpus_mod.KIND_ESD))


def _load_table(path: str) -> EmbeddingTable:
    try:
        return embeddings_mod.load_embeddings(Path(path).read_text(encoding="utf-8"))
    except EmbeddingFormatError as exc:
        raise EmbeddingFormatError(f"{path}: {exc}") from exc


def _group_by_scenario(docs):
    grouped: dict[str, list] = {}
    for doc in docs:
        grouped.setdefault(doc.scenario, []).append(doc)
    return grouped


def _scenario_filename(scenario: str, suffix: str) -> str:
    if not scenario or any(c in scenario for c in "/\\") or scenario.startswith("."):
        raise ValueError(f"scenario id {scenario!r} is not usable as a file name")
    return f"{scenario}{suffix}"


def _write_text(path: str, text: str):
    target = Path(path)
    if target.parent and not target.parent.exists():
        target.parent.mkdir(parents=True, exist_ok=True)
    target.write_text(text, encoding="utf-8")


def _json_text(payload) -> str:
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"


def _tree_config(args) -> TreeConfig:
    return TreeConfig(
        min_instances=args.min_instances,
        confidence=args.confidence,
        prune=not args.no_prune,
    )


def _train_config(args) -> TrainConfig:
    return TrainConfig(l2=args.l2, max_iterations=args.max_iter, seed=args.seed)


# ---------------------------------------------------------------- commands


def cmd_validate(args) -> int:
    for path in args.paths:
        docs = _parse_docs(path, args.kind)
        stories = [d for d in docs if isinstance(d, Story)]
        esds = [d for d in docs if isinstance(d, EsdDocument)]
        scenarios = corpus_mod.collect_scenarios(docs)
        tokens = 0
        for doc in docs:
            blocks = doc.sentences if isinstance(doc, Story) else [e.tokens for e in doc.eds]
            tokens += sum(len(b) for b in blocks)
        print(
            f"{path}: {len(docs)} documents ({len(stories)} stories,"
            f" {len(esds)} ESD documents), {len(scenarios)} scenarios, {tokens} tokens"
        )
    print("OK")
    return EXIT_OK


def cmd_train_identify(args) -> int:
    stories = [
        corpus_mod.resolve_pronouns(s) for s in _parse_stories(args.stories)
    ]
    nonaction = identify_mod.load_nonaction_list(args.nonaction)
    tree_cfg = _tree_config(args)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    def rows_for(subset, stats):
        rows = []
        for story in subset:
            for m in story.mentions:
                rows.append(
                    identify_mod.tree_row(
                        identify_mod.extract_row(m, story, stats, nonaction)
                    )
                )
        return rows

    if args.scenario_independent:
        schema = identify_mod.row_schema(False)
        tree = identify_mod.train_tree(rows_for(stories, None), schema, tree_cfg)
        target = out_dir / INDEPENDENT_TREE_FILE
        identify_mod.save_tree(tree, target)
        print(f"wrote {target}")
        return EXIT_OK
    if not args.esds:
        raise CliUsageError("--esds is required unless --scenario-independent is set")
    stats_by_scenario = features_mod.build_scenario_stats(_parse_esds(args.esds))
    schema = identify_mod.row_schema(True)
    for scenario, subset in sorted(_group_by_scenario(stories).items()):
        if scenario not in stats_by_scenario:
            raise ValueError(f"no ESDs for scenario {scenario!r}")
        tree = identify_mod.train_tree(
            rows_for(subset, stats_by_scenario[scenario]), schema, tree_cfg
        )
        target = out_dir / _scenario_filename(scenario, ".tree.json")
        identify_mod.save_tree(tree, target)
        print(f"wrote {target}")
    return EXIT_OK


def cmd_identify(args) -> int:
    stories = [
        corpus_mod.resolve_pronouns(s) for s in _parse_stories(args.stories)
    ]
    nonaction = identify_mod.load_nonaction_list(args.nonaction)
    model_dir = Path(args.model_dir)
    stats_by_scenario = {}
    if not args.scenario_independent:
        if not args.esds:
            raise CliUsageError("--esds is required unless --scenario-independent is set")
        stats_by_scenario = features_mod.build_scenario_stats(_parse_esds(args.esds))
    trees: dict[str, identify_mod.DecisionTree] = {}

    def tree_for(scenario: str):
        key = "" if args.scenario_independent else scenario
        if key not in trees:
            name = (
                INDEPENDENT_TREE_FILE
                if args.scenario_independent
                else _scenario_filename(scenario, ".tree.json")
            )
            trees[key] = identify_mod.load_tree(model_dir / name)
        return trees[key]

    outputs = []
    n_event = 0
    n_total = 0
    for story in stories:
        stats = None
        if not args.scenario_independent:
            if story.scenario not in stats_by_scenario:
                raise ValueError(f"no ESDs for scenario {story.scenario!r}")
            stats = stats_by_scenario[story.scenario]
        tree = tree_for(story.scenario)
        labels = {}
        for m in story.mentions:
            attrs, _ = identify_mod.tree_row(
                identify_mod.extract_row(m, story, stats, nonaction)
            )
            pred = identify_mod.classify_binary(tree, attrs)
            labels[(m.sentence, m.token_index)] = pred
            n_event += pred == corpus_mod.EVENT
            n_total += 1
        outputs.append(corpus_mod.with_predictions(story, labels))
    _write_text(args.out, corpus_mod.serialize_corpus(outputs))
    print(f"wrote {args.out}: {n_event}/{n_total} mentions identified as events")
    return EXIT_OK


def _tuning_split(docs: Sequence[EsdDocument], fraction: float, seed: int):
    ordered = sorted(docs, key=lambda d: d.doc_id)
    random.Random(seed).shuffle(ordered)
    n_dev = min(max(1, round(fraction * len(ordered))), len(ordered) - 1)
    return ordered[n_dev:], ordered[:n_dev]


def cmd_train_map(args) -> int:
    esds = _parse_esds(args.esds)
    table = _load_table(args.embeddings)
    cfg = _train_config(args)
    use_transitions = not args.no_seq
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    eps_map: dict[str, float] = {}
    for scenario, docs in sorted(_group_by_scenario(esds).items()):
        eps = args.epsilon
        if args.tune:
            if len(docs) < 2:
                logger.warning(
                    "scenario %r has %d ESD(s); epsilon tuning needs at least 2,"
                    " using the default",
                    scenario,
                    len(docs),
                )
            else:
                train_docs, dev_docs = _tuning_split(docs, args.dev_fraction, args.seed)
                eps = embeddings_mod.tune_epsilon(
                    train_docs, dev_docs, args.grid, table, cfg, use_transitions
                )
        disc = DiscretizationConfig(epsilon=eps)
        sequences = features_mod.esd_training_sequences(docs, table, disc)
        if not sequences:
            logger.warning("scenario %r has no usable training EDs; skipped", scenario)
            continue
        labels = features_mod.training_label_set(sequences)
        model = crf_mod.train(sequences, labels, cfg, use_transitions=use_transitions)
        target = out_dir / _scenario_filename(scenario, ".crf.json")
        crf_mod.save_model(model, target)
        eps_map[scenario] = eps
        print(f"wrote {target} (epsilon {eps:g}, {len(labels)} event types)")
    sidecar = out_dir / MAPPING_CONFIG_FILE
    sidecar.write_text(
        _json_text(
            {
                "epsilon": eps_map,
                "epsilon_default": args.epsilon,
                "use_transitions": use_transitions,
            }
        ),
        encoding="utf-8",
    )
    print(f"wrote {sidecar}")
    return EXIT_OK


def cmd_map(args) -> int:
    stories = [
        corpus_mod.resolve_pronouns(s) for s in _parse_stories(args.stories)
    ]
    table = _load_table(args.embeddings)
    model_dir = Path(args.model_dir)
    eps_by_scenario: dict[str, float] = {}
    eps_default = args.epsilon
    sidecar = model_dir / MAPPING_CONFIG_FILE
    if sidecar.exists():
        payload = json.loads(sidecar.read_text(encoding="utf-8"))
        eps_by_scenario = {k: float(v) for k, v in payload.get("epsilon", {}).items()}
        eps_default = float(payload.get("epsilon_default", eps_default))
    models: dict[str, crf_mod.CrfModel] = {}

    def model_for(scenario: str) -> crf_mod.CrfModel:
        if scenario not in models:
            models[scenario] = crf_mod.load_model(
                model_dir / _scenario_filename(scenario, ".crf.json")
            )
        return models[scenario]

    outputs = []
    n_labeled = 0
    for story in stories:
        mentions = story.script_mentions()
        labels = {}
        if mentions:
            disc = DiscretizationConfig(
                epsilon=eps_by_scenario.get(story.scenario, eps_default)
            )
            obs = features_mod.story_decode_sequence(story, mentions, table, disc)
            preds, _ = crf_mod.viterbi(model_for(story.scenario), obs)
            for m, pred in zip(mentions, preds):
                labels[(m.sentence, m.token_index)] = pred
            n_labeled += len(preds)
        outputs.append(corpus_mod.with_predictions(story, labels))
    _write_text(args.out, corpus_mod.serialize_corpus(outputs))
    print(f"wrote {args.out}: {n_labeled} mentions labeled")
    return EXIT_OK


def cmd_tune_epsilon(args) -> int:
    esds = _parse_esds(args.esds)
    table = _load_table(args.embeddings)
    cfg = _train_config(args)
    result: dict[str, float] = {}
    for scenario, docs in sorted(_group_by_scenario(esds).items()):
        if len(docs) < 2:
            logger.warning(
                "scenario %r has %d ESD(s); epsilon tuning needs at least 2, skipped",
                scenario,
                len(docs),
            )
            continue
        train_docs, dev_docs = _tuning_split(docs, args.dev_fraction, args.seed)
        result[scenario] = embeddings_mod.tune_epsilon(
            train_docs, dev_docs, args.grid, table, cfg, not args.no_seq
        )
    text = _json_text(result)
    if args.out:
        _write_text(args.out, text)
        print(f"wrote {args.out}")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _evaluation_outputs(args, reports: list, config: dict, experiment: str) -> int:
    table = evaluation_mod.format_table(reports)
    print(table)
    if args.table_out:
        _write_text(args.table_out, table + "\n")
    if args.json_out:
        payload = {
            "experiment": experiment,
            "config": config,
            "systems": {r.system: r.to_dict() for r in reports},
        }
        _write_text(args.json_out, _json_text(payload))
    return EXIT_OK


def _check_systems(requested: Sequence[str], allowed: Sequence[str], what: str):
    unknown = [s for s in requested if s not in allowed]
    if unknown:
        raise CliUsageError(
            f"unknown {what} {', '.join(map(repr, unknown))};"
            f" choose from {', '.join(allowed)}"
        )
    if not requested:
        raise CliUsageError(f"no {what} requested")


def cmd_evaluate_identification(args) -> int:
    _check_systems(args.systems, evaluation_mod.IDENTIFICATION_SYSTEMS, "system(s)")
    stories = _parse_stories(args.stories)
    esds = _parse_esds(args.esds) if args.esds else None
    nonaction = identify_mod.load_nonaction_list(args.nonaction)
    tree_cfg = _tree_config(args)
    reports = [
        evaluation_mod.evaluate_identification(
            stories,
            esds,
            system=system,
            k=args.k,
            seed=args.seed,
            scenario_independent=args.scenario_independent,
            nonaction=nonaction,
            tree_config=tree_cfg,
        )
        for system in args.systems
    ]
    config = {
        "stories": args.stories,
        "esds": args.esds,
        "k": args.k,
        "seed": args.seed,
        "scenario_independent": args.scenario_independent,
        "min_instances": args.min_instances,
        "confidence": args.confidence,
        "prune": not args.no_prune,
    }
    return _evaluation_outputs(args, reports, config, "identification")


def cmd_evaluate_classification(args) -> int:
    _check_systems(args.systems, evaluation_mod.CLASSIFICATION_SYSTEMS, "system(s)")
    esds = _parse_esds(args.esds)
    stories = _parse_stories(args.stories)
    needs_table = any(s in ("crf", "crf_noseq", "cosine") for s in args.systems)
    if needs_table and not args.embeddings:
        raise CliUsageError("--embeddings is required for crf/crf_noseq/cosine systems")
    table = _load_table(args.embeddings) if args.embeddings else None
    disc = DiscretizationConfig(epsilon=args.epsilon)
    cfg = _train_config(args)
    reports = [
        evaluation_mod.evaluate_classification(
            esds, stories, system=system, table=table, disc=disc, train_config=cfg
        )
        for system in args.systems
    ]
    config = {
        "esds": args.esds,
        "stories": args.stories,
        "embeddings": args.embeddings,
        "epsilon": args.epsilon,
        "l2": args.l2,
        "max_iter": args.max_iter,
        "seed": args.seed,
    }
    return _evaluation_outputs(args, reports, config, "classification")


def cmd_evaluate_pipeline(args) -> int:
    _check_systems(args.systems, evaluation_mod.CLASSIFICATION_SYSTEMS, "classifier(s)")
    _check_systems([args.identifier], evaluation_mod.PIPELINE_IDENTIFIERS, "identifier")
    esds = _parse_esds(args.esds)
    stories = _parse_stories(args.stories)
    needs_table = any(s in ("crf", "crf_noseq", "cosine") for s in args.systems)
    if needs_table and not args.embeddings:
        raise CliUsageError("--embeddings is required for crf/crf_noseq/cosine systems")
    table = _load_table(args.embeddings) if args.embeddings else None
    disc = DiscretizationConfig(epsilon=args.epsilon)
    nonaction = identify_mod.load_nonaction_list(args.nonaction)
    reports = [
        evaluation_mod.evaluate_pipeline(
            esds,
            stories,
            identifier=args.identifier,
            classifier=classifier,
            table=table,
            disc=disc,
            k=args.k,
            seed=args.seed,
            nonaction=nonaction,
            tree_config=_tree_config(args),
            train_config=_train_config(args),
        )
        for classifier in args.systems
    ]
    config = {
        "esds": args.esds,
        "stories": args.stories,
        "embeddings": args.embeddings,
        "identifier": args.identifier,
        "epsilon": args.epsilon,
        "k": args.k,
        "seed": args.seed,
        "l2": args.l2,
        "max_iter": args.max_iter,
        "min_instances": args.min_instances,
        "confidence": args.confidence,
        "prune": not args.no_prune,
    }
    return _evaluation_outputs(args, reports, config, "pipeline")


# ----------------------------------------------------------------- parser


def _add_tree_options(p: _Parser):
    p.add_argument("--min-instances", type=int, default=None,
                   help="smallest node size the tree may still split (default 2)")
    p.add_argument("--confidence", type=float, default=None,
                   help="pruning confidence (default 0.25)")
    p.add_argument("--no-prune", action="store_true", default=None,
                   help="keep the unpruned tree")
    p.add_argument("--nonaction", default=None,
                   help="file with one non-action verb lemma per line")


_TREE_DEFAULTS = {
    "min_instances": 2,
    "confidence": 0.25,
    "no_prune": False,
    "nonaction": None,
}


def _add_crf_options(p: _Parser):
    p.add_argument("--epsilon", type=float, default=None,
                   help="discretization threshold (default 0.05)")
    p.add_argument("--l2", type=float, default=None,
                   help="L2 regularization strength (default 1.0)")
    p.add_argument("--max-iter", type=int, default=None,
                   help="optimizer iteration cap (default 200)")
    p.add_argument("--seed", type=int, default=None, help="random seed (default 42)")


_CRF_DEFAULTS = {"epsilon": 0.05, "l2": 1.0, "max_iter": 200, "seed": 42}


def _add_report_options(p: _Parser):
    p.add_argument("--json-out", default=None, help="write the full report as JSON")
    p.add_argument("--table-out", default=None, help="write the summary table")


def build_parser() -> _Parser:
    from . import __version__

    parser = _Parser(prog="scriptmap", description=__doc__.split("\n\n")[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    common = _Parser(add_help=False)
    common.add_argument("--config", default=None,
                        help="JSON or key=value file with option defaults")
    common.add_argument("--log-level", default=None, choices=LOG_LEVELS)
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser("validate", parents=[common],
                       help="check corpus files and summarize their contents")
    p.add_argument("paths", nargs="+", metavar="CORPUS")
    p.add_argument("--kind", choices=[corpus_mod.KIND_STORY, corpus_mod.KIND_ESD],
                   default=None, help="require every document to have this kind")
    p.set_defaults(func=cmd_validate, defaults={"kind": None, "log_level": "info"})

    p = sub.add_parser("train-identify", parents=[common],
                       help="train decision trees that find script-relevant verbs")
    p.add_argument("--stories", required=True, help="labeled story corpus")
    p.add_argument("--esds", default=None, help="ESD corpus for script features")
    p.add_argument("--out-dir", required=True, help="directory for tree files")
    p.add_argument("--scenario-independent", action="store_true", default=None,
                   help="train one tree without scenario features")
    _add_tree_options(p)
    p.set_defaults(func=cmd_train_identify,
                   defaults={"scenario_independent": False, "log_level": "info",
                             **_TREE_DEFAULTS})

    p = sub.add_parser("identify", parents=[common],
                       help="label verb mentions with saved trees")
    p.add_argument("--stories", required=True)
    p.add_argument("--esds", default=None, help="ESD corpus for script features")
    p.add_argument("--model-dir", required=True)
    p.add_argument("--out", required=True, help="output corpus with predictions")
    p.add_argument("--scenario-independent", action="store_true", default=None)
    p.add_argument("--nonaction", default=None)
    p.set_defaults(func=cmd_identify,
                   defaults={"scenario_independent": False, "nonaction": None,
                             "log_level": "info"})

    p = sub.add_parser("train-map", parents=[common],
                       help="train per-scenario event-type sequence models")
    p.add_argument("--esds", required=True)
    p.add_argument("--embeddings", required=True)
    p.add_argument("--out-dir", required=True)
    p.add_argument("--tune", action="store_true", default=None,
                   help="tune epsilon per scenario on a held-out ESD split")
    p.add_argument("--grid", type=_float_list, default=None,
                   help="comma-separated epsilon candidates")
    p.add_argument("--dev-fraction", type=float, default=None,
                   help="held-out fraction for tuning (default 0.1)")
    p.add_argument("--no-seq", action="store_true", default=None,
                   help="drop transition features (independent labeling)")
    _add_crf_options(p)
    p.set_defaults(func=cmd_train_map,
                   defaults={"tune": False, "grid": list(DEFAULT_EPSILON_GRID),
                             "dev_fraction": 0.1, "no_seq": False,
                             "log_level": "info", **_CRF_DEFAULTS})

    p = sub.add_parser("map", parents=[common],
                       help="assign event types to gold script mentions")
    p.add_argument("--stories", required=True)
    p.add_argument("--model-dir", required=True)
    p.add_argument("--embeddings", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--epsilon", type=float, default=None,
                   help="fallback threshold when the model dir has no config")
    p.set_defaults(func=cmd_map, defaults={"epsilon": 0.05, "log_level": "info"})

    p = sub.add_parser("tune-epsilon", parents=[common],
                       help="pick the discretization threshold per scenario")
    p.add_argument("--esds", required=True)
    p.add_argument("--embeddings", required=True)
    p.add_argument("--grid", type=_float_list, default=None)
    p.add_argument("--dev-fraction", type=float, default=None)
    p.add_argument("--no-seq", action="store_true", default=None)
    p.add_argument("--out", default=None, help="output JSON (stdout when omitted)")
    p.add_argument("--l2", type=float, default=None)
    p.add_argument("--max-iter", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.set_defaults(func=cmd_tune_epsilon,
                   defaults={"grid": list(DEFAULT_EPSILON_GRID), "dev_fraction": 0.1,
                             "no_seq": False, "out": None, "l2": 1.0,
                             "max_iter": 200, "seed": 42, "log_level": "info"})

    p = sub.add_parser("evaluate", help="run an experiment protocol")
    esub = p.add_subparsers(dest="protocol", required=True, metavar="PROTOCOL")

    pe = esub.add_parser("identification", parents=[common],
                         help="cross-validated binary identification")
    pe.add_argument("--stories", required=True)
    pe.add_argument("--esds", default=None)
    pe.add_argument("--systems", type=_str_list, default=None,
                    help="comma list of lemma,tree,oracle,majority (default lemma,tree)")
    pe.add_argument("--k", type=int, default=None, help="folds per scenario (default 10)")
    pe.add_argument("--seed", type=int, default=None)
    pe.add_argument("--scenario-independent", action="store_true", default=None)
    _add_tree_options(pe)
    _add_report_options(pe)
    pe.set_defaults(func=cmd_evaluate_identification,
                    defaults={"systems": ["lemma", "tree"], "k": 10, "seed": 42,
                              "scenario_independent": False, "json_out": None,
                              "table_out": None, "log_level": "info",
                              **_TREE_DEFAULTS})

    pe = esub.add_parser("classification", parents=[common],
                         help="event types for gold script mentions")
    pe.add_argument("--esds", required=True)
    pe.add_argument("--stories", required=True)
    pe.add_argument("--embeddings", default=None)
    pe.add_argument("--systems", type=_str_list, default=None,
                    help="comma list of lemma,cosine,crf,crf_noseq,oracle"
                         " (default lemma,cosine,crf,crf_noseq)")
    _add_crf_options(pe)
    _add_report_options(pe)
    pe.set_defaults(func=cmd_evaluate_classification,
                    defaults={"systems": ["lemma", "cosine", "crf", "crf_noseq"],
                              "json_out": None, "table_out": None,
                              "log_level": "info", **_CRF_DEFAULTS})

    pe = esub.add_parser("pipeline", parents=[common],
                         help="end-to-end identification plus labeling")
    pe.add_argument("--esds", required=True)
    pe.add_argument("--stories", required=True)
    pe.add_argument("--embeddings", default=None)
    pe.add_argument("--identifier", default=None,
                    help="tree, lemma, or oracle (default tree)")
    pe.add_argument("--systems", type=_str_list, default=None,
                    help="comma list of classifiers (default lemma,cosine,crf)")
    pe.add_argument("--k", type=int, default=None)
    _add_crf_options(pe)
    _add_tree_options(pe)
    _add_report_options(pe)
    pe.set_defaults(func=cmd_evaluate_pipeline,
                    defaults={"identifier": "tree",
                              "systems": ["lemma", "cosine", "crf"], "k": 10,
                              "json_out": None, "table_out": None,
                              "log_level": "info", **_TREE_DEFAULTS,
                              **_CRF_DEFAULTS})
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        _merge_config(args)
        _setup_logging(args.log_level)
        return args.func(args)
    except CliUsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NumericError as exc:
        logger.error("numeric failure: %s", exc)
        return EXIT_NUMERIC
    except (
        CorpusFormatError,
        EmbeddingFormatError,
        ModelFormatError,
        TreeFormatError,
        OSError,
        KeyError,
        ValueError,
    ) as exc:
        logger.error("%s", exc)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
