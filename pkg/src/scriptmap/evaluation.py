"""Confusion-matrix metrics and the three experiment protocols.

Identification runs k-fold cross-validation over each scenario's stories (or
leave-one-scenario-out in scenario-independent mode) and scores the binary
event class. Classification trains one sequence model per scenario on its
ESDs alone and decodes the gold script-relevant mentions of that scenario's
stories. The pipeline chains both: mentions the identifier accepts are
labeled by the classifier; a mention counts as a true positive of type t only
if it was identified, labeled t, and gold-labeled t, while wrongly identified
mentions become false positives of their predicted type.

Metric conventions: precision/recall with zero denominators are 0; F1 is the
harmonic mean (0 when P + R = 0); macro averages run over event types within
a scenario, then over scenarios; fold counts are pooled into one confusion
matrix per scenario before computing P/R.
"""

from __future__ import annotations

import logging
from collections import Counter
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from . import baselines as baselines_mod
from . import crf as crf_mod
from . import features as features_mod
from . import identify as identify_mod
from .corpus import (
    DEFAULT_MENTION_CONFIG,
    EVENT,
    NON_SCRIPT,
    NON_SCRIPT_KINDS,
    EsdDocument,
    FoldPlan,
    MentionConfig,
    Story,
    collapse_label,
    leave_one_scenario_out,
    within_scenario_plan,
    resolve_pronouns,
)
from .embeddings import DiscretizationConfig, EmbeddingTable

logger = logging.getLogger(__name__)

IDENTIFICATION_SYSTEMS = ("tree", "lemma", "oracle", "majority")
CLASSIFICATION_SYSTEMS = ("crf", "crf_noseq", "lemma", "cosine", "oracle")
PIPELINE_IDENTIFIERS = ("tree", "lemma", "oracle")


class ConfusionMatrix:
    """Gold-by-predicted counts; labels grow in first-appearance order."""

    def __init__(self, labels: Sequence[str] = ()):
        self.labels: list[str] = list(dict.fromkeys(labels))
        self._counts: Counter = Counter()

    def add(self, gold: str, pred: str, n: int = 1):
        for label in (gold, pred):
            if label not in self.labels:
                self.labels.append(label)
        self._counts[(gold, pred)] += n

    def count(self, gold: str, pred: str) -> int:
        return self._counts[(gold, pred)]

    def merge(self, other: "ConfusionMatrix"):
        for (gold, pred), n in other._counts.items():
            self.add(gold, pred, n)

    @property
    def total(self) -> int:
        return sum(self._counts.values())

    @property
    def diagonal(self) -> int:
        return sum(n for (g, p), n in self._counts.items() if g == p)

    def gold_total(self, label: str) -> int:
        return sum(n for (g, _), n in self._counts.items() if g == label)

    def pred_total(self, label: str) -> int:
        return sum(n for (_, p), n in self._counts.items() if p == label)

    def to_dict(self) -> dict:
        return {
            "labels": list(self.labels),
            "counts": [[self._counts[(g, p)] for p in self.labels] for g in self.labels],
        }


def f1_score(precision: float, recall: float) -> float:
    """Harmonic mean; 0 when both components vanish."""
    if precision + recall == 0.0:
        return 0.0
    return 2.0 * precision * recall / (precision + recall)


def prf(cm: ConfusionMatrix, label: str) -> tuple[float, float, float]:
    """Precision, recall, F1 of one class; zero denominators give 0."""
    tp = cm.count(label, label)
    predicted = cm.pred_total(label)
    gold = cm.gold_total(label)
    precision = tp / predicted if predicted else 0.0
    recall = tp / gold if gold else 0.0
    return precision, recall, f1_score(precision, recall)


def micro_accuracy(cm: ConfusionMatrix) -> float:
    return cm.diagonal / cm.total if cm.total else 0.0


def macro_prf(cm: ConfusionMatrix, classes: Sequence[str]) -> tuple[float, float, float]:
    """Unweighted mean of per-class P/R/F1 over `classes`."""
    if not classes:
        return 0.0, 0.0, 0.0
    triples = [prf(cm, c) for c in classes]
    n = len(triples)
    return (
        sum(t[0] for t in triples) / n,
        sum(t[1] for t in triples) / n,
        sum(t[2] for t in triples) / n,
    )


@dataclass
class ScenarioResult:
    scenario: str
    confusion: ConfusionMatrix
    classes: list[str]
    precision: float
    recall: float
    f1: float
    micro_accuracy: float
    notes: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        per_class = {}
        for c in self.classes:
            p, r, f = prf(self.confusion, c)
            per_class[c] = {"precision": p, "recall": r, "f1": f}
        return {
            "scenario": self.scenario,
            "classes": per_class,
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
            "micro_accuracy": self.micro_accuracy,
            "confusion": self.confusion.to_dict(),
            "notes": list(self.notes),
        }


@dataclass
class EvalReport:
    experiment: str
    system: str
    scenarios: list[ScenarioResult]
    precision: float
    recall: float
    f1: float
    micro_accuracy: float
    metadata: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "experiment": self.experiment,
            "system": self.system,
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
            "micro_accuracy": self.micro_accuracy,
            "scenarios": [s.to_dict() for s in self.scenarios],
            "metadata": dict(self.metadata),
        }


def _finish_report(
    experiment: str,
    system: str,
    confusions: Mapping[str, ConfusionMatrix],
    class_sets: Mapping[str, Sequence[str]],
    notes: Mapping[str, list[str]],
    metadata: dict,
) -> EvalReport:
    """Assemble per-scenario results and the cross-scenario macro average."""
    results = []
    pooled = ConfusionMatrix()
    for scenario in sorted(confusions):
        cm = confusions[scenario]
        classes = list(class_sets[scenario])
        p, r, f = macro_prf(cm, classes)
        results.append(
            ScenarioResult(
                scenario=scenario,
                confusion=cm,
                classes=classes,
                precision=p,
                recall=r,
                f1=f,
                micro_accuracy=micro_accuracy(cm),
                notes=list(notes.get(scenario, [])),
            )
        )
        pooled.merge(cm)
    n = len(results)
    return EvalReport(
        experiment=experiment,
        system=system,
        scenarios=results,
        precision=sum(r.precision for r in results) / n if n else 0.0,
        recall=sum(r.recall for r in results) / n if n else 0.0,
        f1=sum(r.f1 for r in results) / n if n else 0.0,
        micro_accuracy=micro_accuracy(pooled),
        metadata=metadata,
    )


def _stories_by_id(stories: Sequence[Story], mention_cfg: MentionConfig) -> dict[str, Story]:
    resolved = {}
    for story in stories:
        if story.doc_id in resolved:
            raise ValueError(f"duplicate story id {story.doc_id!r}")
        resolved[story.doc_id] = resolve_pronouns(story, mention_cfg)
    return resolved


def _mention_attrs(
    mention,
    story: Story,
    stats,
    nonaction: frozenset[str],
    mention_cfg: MentionConfig,
):
    row = identify_mod.extract_row(mention, story, stats, nonaction, mention_cfg)
    return identify_mod.tree_row(row)


def evaluate_identification(
    stories: Sequence[Story],
    esd_docs: Sequence[EsdDocument] | None = None,
    *,
    system: str = "tree",
    plan: FoldPlan | None = None,
    k: int = 10,
    seed: int = 42,
    scenario_independent: bool = False,
    nonaction: frozenset[str] | None = None,
    tree_config: identify_mod.TreeConfig | None = None,
    mention_cfg: MentionConfig = DEFAULT_MENTION_CONFIG,
) -> EvalReport:
    """Cross-validated binary identification, scored on the event class.

    Scenario-specific mode folds each scenario's stories separately and uses
    script features from that scenario's ESDs; scenario-independent mode
    leaves one scenario out at a time and drops the script features. Folds
    whose training rows hold a single class are skipped with a warning.
    """
    if system not in IDENTIFICATION_SYSTEMS:
        raise ValueError(f"unknown identification system {system!r}")
    story_map = _stories_by_id(stories, mention_cfg)
    scenario_specific = not scenario_independent
    stats_by_scenario: dict[str, features_mod.ScenarioStats] = {}
    if esd_docs:
        stats_by_scenario = features_mod.build_scenario_stats(list(esd_docs))
    needs_esds = system == "lemma" or (system == "tree" and scenario_specific)
    if needs_esds:
        covered = {d.scenario for d in esd_docs or []}
        missing = sorted({s.scenario for s in story_map.values()} - covered)
        if missing:
            raise ValueError(
                f"identification system {system!r} needs ESDs for scenarios {missing}"
            )
    if plan is None:
        if scenario_independent:
            by_scenario: dict[str, list[str]] = {}
            for story in story_map.values():
                by_scenario.setdefault(story.scenario, []).append(story.doc_id)
            plan = leave_one_scenario_out(by_scenario)
        else:
            plan = within_scenario_plan(list(story_map.values()), k, seed)
    nonaction = nonaction if nonaction is not None else identify_mod.load_nonaction_list()
    ed_indexes: dict[str, baselines_mod.EdIndex] = {}
    if system == "lemma":
        by_scenario_docs: dict[str, list[EsdDocument]] = {}
        for doc in esd_docs or []:
            by_scenario_docs.setdefault(doc.scenario, []).append(doc)
        ed_indexes = {
            s: baselines_mod.build_ed_index(docs, cfg=mention_cfg)
            for s, docs in by_scenario_docs.items()
        }
    schema = identify_mod.row_schema(scenario_specific)
    confusions: dict[str, ConfusionMatrix] = {}
    notes: dict[str, list[str]] = {}
    skipped = 0

    def stats_for(story: Story):
        return stats_by_scenario.get(story.scenario) if scenario_specific else None

    for fold_idx, (train_ids, test_ids) in enumerate(plan.folds):
        tree = None
        if system == "tree":
            rows = []
            for doc_id in train_ids:
                story = story_map[doc_id]
                for m in story.mentions:
                    rows.append(
                        _mention_attrs(m, story, stats_for(story), nonaction, mention_cfg)
                    )
            classes = {label for _, label in rows}
            if not rows or len(classes) < 2:
                skipped += 1
                logger.warning(
                    "fold %d: training rows contain %d class(es); fold skipped",
                    fold_idx,
                    len(classes),
                )
                for doc_id in test_ids:
                    scenario = story_map[doc_id].scenario
                    notes.setdefault(scenario, []).append(
                        f"fold {fold_idx} skipped: single-class training data"
                    )
                continue
            tree = identify_mod.train_tree(rows, schema, tree_config)
        for doc_id in test_ids:
            story = story_map[doc_id]
            cm = confusions.setdefault(
                story.scenario, ConfusionMatrix([EVENT, NON_SCRIPT])
            )
            for m in story.mentions:
                gold = collapse_label(m.gold_label)
                if system == "tree":
                    attrs, _ = _mention_attrs(
                        m, story, stats_for(story), nonaction, mention_cfg
                    )
                    pred = identify_mod.classify_binary(tree, attrs)
                elif system == "lemma":
                    pred = baselines_mod.lemma_identify(m, ed_indexes[story.scenario])
                elif system == "oracle":
                    pred = gold
                else:  # majority
                    pred = NON_SCRIPT
                cm.add(gold, pred)
    class_sets = {s: [EVENT] for s in confusions}
    return _finish_report(
        "identification",
        system,
        confusions,
        class_sets,
        notes,
        {
            "fold_kind": plan.kind,
            "k": k,
            "seed": seed,
            "scenario_independent": scenario_independent,
            "skipped_folds": skipped,
        },
    )


def _scenario_event_classes(cm: ConfusionMatrix) -> list[str]:
    return [l for l in cm.labels if l != NON_SCRIPT]


def evaluate_classification(
    esd_docs: Sequence[EsdDocument],
    stories: Sequence[Story],
    *,
    system: str = "crf",
    table: EmbeddingTable | None = None,
    disc: DiscretizationConfig | None = None,
    train_config: crf_mod.TrainConfig | None = None,
    mention_cfg: MentionConfig = DEFAULT_MENTION_CONFIG,
) -> EvalReport:
    """Event-type assignment for gold script-relevant mentions.

    One model per scenario, trained on that scenario's ESDs only, decodes
    each story's script mentions as one sequence (crf), independently
    (crf_noseq), or via ED similarity (lemma/cosine). Scenarios without
    usable ESDs are skipped with a warning; gold event types absent from the
    training labels are flagged and count as unrecoverable misses.
    """
    if system not in CLASSIFICATION_SYSTEMS:
        raise ValueError(f"unknown classification system {system!r}")
    if table is None and system in ("crf", "crf_noseq", "cosine"):
        raise ValueError(f"system {system!r} needs an embedding table")
    disc = disc or DiscretizationConfig()
    story_map = _stories_by_id(stories, mention_cfg)
    esds_by_scenario: dict[str, list[EsdDocument]] = {}
    for doc in esd_docs:
        esds_by_scenario.setdefault(doc.scenario, []).append(doc)
    confusions: dict[str, ConfusionMatrix] = {}
    notes: dict[str, list[str]] = {}
    stories_by_scenario: dict[str, list[Story]] = {}
    for story in story_map.values():
        stories_by_scenario.setdefault(story.scenario, []).append(story)
    for scenario in sorted(stories_by_scenario):
        scenario_stories = sorted(stories_by_scenario[scenario], key=lambda s: s.doc_id)
        esds = esds_by_scenario.get(scenario, [])
        if not esds:
            logger.warning("scenario %r has no ESDs; stories skipped", scenario)
            continue
        model = None
        index = None
        training_labels: tuple[str, ...] = ()
        if system in ("crf", "crf_noseq"):
            sequences = features_mod.esd_training_sequences(esds, table, disc, mention_cfg)
            if not sequences:
                logger.warning("scenario %r has no usable training EDs; skipped", scenario)
                continue
            training_labels = features_mod.training_label_set(sequences)
            model = crf_mod.train(
                sequences,
                training_labels,
                train_config,
                use_transitions=(system == "crf"),
            )
        elif system in ("lemma", "cosine"):
            index = baselines_mod.build_ed_index(
                esds, table if system == "cosine" else None, mention_cfg
            )
            if not index.entries.get(scenario):
                logger.warning("scenario %r has no script EDs; skipped", scenario)
                continue
            training_labels = tuple(
                dict.fromkeys(e.event_type for e in index.scenario_entries(scenario))
            )
        cm = confusions.setdefault(scenario, ConfusionMatrix())
        unseen: set[str] = set()
        for story in scenario_stories:
            mentions = story.script_mentions()
            if not mentions:
                continue
            if system in ("crf", "crf_noseq"):
                obs = features_mod.story_decode_sequence(
                    story, mentions, table, disc, mention_cfg
                )
                preds, _ = crf_mod.viterbi(model, obs)
            elif system == "lemma":
                preds = [
                    baselines_mod.overlap_classify(m, index, scenario) for m in mentions
                ]
            elif system == "cosine":
                preds = [
                    baselines_mod.cosine_classify(m, index, scenario, table)
                    for m in mentions
                ]
            else:  # oracle
                preds = [m.gold_label for m in mentions]
            for m, pred in zip(mentions, preds):
                cm.add(m.gold_label, pred)
                if training_labels and m.gold_label not in training_labels:
                    unseen.add(m.gold_label)
        if unseen:
            notes.setdefault(scenario, []).append(
                "gold event types absent from training: " + ", ".join(sorted(unseen))
            )
    class_sets = {s: _scenario_event_classes(cm) for s, cm in confusions.items()}
    return _finish_report(
        "classification",
        system,
        confusions,
        class_sets,
        notes,
        {
            "epsilon": disc.epsilon,
            "l2": (train_config or crf_mod.TrainConfig()).l2,
        },
    )


def evaluate_pipeline(
    esd_docs: Sequence[EsdDocument],
    stories: Sequence[Story],
    *,
    identifier: str = "tree",
    classifier: str = "crf",
    table: EmbeddingTable | None = None,
    disc: DiscretizationConfig | None = None,
    k: int = 10,
    seed: int = 42,
    nonaction: frozenset[str] | None = None,
    tree_config: identify_mod.TreeConfig | None = None,
    train_config: crf_mod.TrainConfig | None = None,
    mention_cfg: MentionConfig = DEFAULT_MENTION_CONFIG,
) -> EvalReport:
    """End-to-end scoring over every labeled verb mention.

    Identification predictions come from cross-validated trees (each story is
    decoded by the fold that held it out), the lemma baseline, or the gold
    oracle. Mentions identified as events are labeled by the classifier; all
    mentions enter the confusion matrix, with non-script gold or predictions
    mapped to the reserved non_script class. Macro averages cover event types
    only.
    """
    if identifier not in PIPELINE_IDENTIFIERS:
        raise ValueError(f"unknown pipeline identifier {identifier!r}")
    if classifier not in CLASSIFICATION_SYSTEMS:
        raise ValueError(f"unknown pipeline classifier {classifier!r}")
    if table is None and classifier in ("crf", "crf_noseq", "cosine"):
        raise ValueError(f"classifier {classifier!r} needs an embedding table")
    disc = disc or DiscretizationConfig()
    story_map = _stories_by_id(stories, mention_cfg)
    nonaction = nonaction if nonaction is not None else identify_mod.load_nonaction_list()
    stats_by_scenario = features_mod.build_scenario_stats(list(esd_docs))
    esds_by_scenario: dict[str, list[EsdDocument]] = {}
    for doc in esd_docs:
        esds_by_scenario.setdefault(doc.scenario, []).append(doc)

    missing = sorted({s.scenario for s in story_map.values()} - set(esds_by_scenario))
    if missing:
        raise ValueError(f"pipeline needs ESDs for scenarios {missing}")

    # Stage 1: binary identification per mention, fold-respecting for trees.
    identified: dict[tuple[str, int, int], str] = {}
    schema = identify_mod.row_schema(True)
    if identifier == "tree":
        plan = within_scenario_plan(list(story_map.values()), k, seed)
        for train_ids, test_ids in plan.folds:
            rows = []
            for doc_id in train_ids:
                story = story_map[doc_id]
                stats = stats_by_scenario[story.scenario]
                for m in story.mentions:
                    rows.append(_mention_attrs(m, story, stats, nonaction, mention_cfg))
            tree = identify_mod.train_tree(rows, schema, tree_config)
            for doc_id in test_ids:
                story = story_map[doc_id]
                stats = stats_by_scenario[story.scenario]
                for m in story.mentions:
                    attrs, _ = _mention_attrs(m, story, stats, nonaction, mention_cfg)
                    identified[(doc_id, m.sentence, m.token_index)] = (
                        identify_mod.classify_binary(tree, attrs)
                    )
    else:
        indexes = {
            s: baselines_mod.build_ed_index(docs, cfg=mention_cfg)
            for s, docs in esds_by_scenario.items()
        }
        for doc_id, story in story_map.items():
            for m in story.mentions:
                if identifier == "oracle":
                    pred = collapse_label(m.gold_label)
                else:
                    pred = baselines_mod.lemma_identify(m, indexes[story.scenario])
                identified[(doc_id, m.sentence, m.token_index)] = pred

    # Stage 2: event-type assignment for identified mentions, per scenario.
    confusions: dict[str, ConfusionMatrix] = {}
    notes: dict[str, list[str]] = {}
    stories_by_scenario: dict[str, list[Story]] = {}
    for story in story_map.values():
        stories_by_scenario.setdefault(story.scenario, []).append(story)
    for scenario in sorted(stories_by_scenario):
        scenario_stories = sorted(stories_by_scenario[scenario], key=lambda s: s.doc_id)
        esds = esds_by_scenario[scenario]
        model = None
        index = None
        fallback_type = "event"
        if classifier in ("crf", "crf_noseq"):
            sequences = features_mod.esd_training_sequences(esds, table, disc, mention_cfg)
            if not sequences:
                logger.warning("scenario %r has no usable training EDs; skipped", scenario)
                continue
            labels = features_mod.training_label_set(sequences)
            fallback_type = labels[0]
            model = crf_mod.train(
                sequences, labels, train_config, use_transitions=(classifier == "crf")
            )
        else:
            index = baselines_mod.build_ed_index(
                esds, table if classifier == "cosine" else None, mention_cfg
            )
            if not index.entries.get(scenario):
                logger.warning("scenario %r has no script EDs; skipped", scenario)
                continue
            fallback_type = index.scenario_entries(scenario)[0].event_type
        cm = confusions.setdefault(scenario, ConfusionMatrix())
        for story in scenario_stories:
            accepted = [
                m
                for m in story.mentions
                if identified[(story.doc_id, m.sentence, m.token_index)] == EVENT
            ]
            preds: dict[tuple[int, int], str] = {}
            if accepted:
                if classifier in ("crf", "crf_noseq"):
                    obs = features_mod.story_decode_sequence(
                        story, accepted, table, disc, mention_cfg
                    )
                    labels_out, _ = crf_mod.viterbi(model, obs)
                elif classifier == "lemma":
                    labels_out = [
                        baselines_mod.overlap_classify(m, index, scenario)
                        for m in accepted
                    ]
                elif classifier == "cosine":
                    labels_out = [
                        baselines_mod.cosine_classify(m, index, scenario, table)
                        for m in accepted
                    ]
                else:  # oracle
                    labels_out = [
                        m.gold_label
                        if m.gold_label not in NON_SCRIPT_KINDS
                        else fallback_type
                        for m in accepted
                    ]
                for m, label in zip(accepted, labels_out):
                    preds[(m.sentence, m.token_index)] = label
            for m in story.mentions:
                gold = (
                    m.gold_label if m.gold_label not in NON_SCRIPT_KINDS else NON_SCRIPT
                )
                pred = preds.get((m.sentence, m.token_index), NON_SCRIPT)
                cm.add(gold, pred)
    class_sets = {s: _scenario_event_classes(cm) for s, cm in confusions.items()}
    return _finish_report(
        "pipeline",
        f"{identifier}+{classifier}",
        confusions,
        class_sets,
        notes,
        {
            "identifier": identifier,
            "classifier": classifier,
            "k": k,
            "seed": seed,
            "epsilon": disc.epsilon,
        },
    )


def format_table(reports: Sequence[EvalReport]) -> str:
    """Fixed-width summary table, one row per system."""
    width = max([len("system")] + [len(r.system) for r in reports])
    lines = [f"{'system':<{width}}      P      R     F1    acc"]
    for r in reports:
        lines.append(
            f"{r.system:<{width}}  {r.precision:5.3f}  {r.recall:5.3f}"
            f"  {r.f1:5.3f}  {r.micro_accuracy:5.3f}"
        )
    return "\n".join(lines)
