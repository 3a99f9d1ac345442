"""Observation columns for the sequence labeler, plus scenario statistics.

Every labeled unit (a story verb mention, or one ED of an ESD) becomes a fixed
tuple of nominal columns::

    verb_lemma, direct_object_lemma, indirect_object_lemma, bin_1 .. bin_d

The object columns take the first dependent of the respective relation in
token order, ``_`` when there is none. The d bin columns discretize the unit's
mention vector; when no vector exists every bin column is ``_``. For mentions
the vector context is the nominal dependents; for EDs it is all head nouns.

Scenario statistics support the identifier's script features: the verb-lemma
inventory of a scenario's ESDs and tf-idf weights that treat all ESDs of one
scenario as a single document.
"""

from __future__ import annotations

import logging
import math
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .corpus import (
    DEFAULT_MENTION_CONFIG,
    ABSENT,
    EsdDocument,
    EventDescription,
    MentionConfig,
    Story,
    VerbMention,
)
from .embeddings import DiscretizationConfig, EmbeddingTable, discretize, mention_vector

logger = logging.getLogger(__name__)

Observation = tuple[str, ...]
LabeledSequence = tuple[list[Observation], list[str]]


def column_names(dimension: int) -> tuple[str, ...]:
    return ("verb", "dobj", "iobj") + tuple(f"bin_{i + 1}" for i in range(dimension))


def _object_columns(
    dependents: Sequence[tuple[str, str]], cfg: MentionConfig
) -> tuple[str, str]:
    dobj = next((l for rel, l in dependents if rel in cfg.dobj_deprels), ABSENT)
    iobj = next((l for rel, l in dependents if rel in cfg.iobj_deprels), ABSENT)
    return dobj, iobj


def _with_bins(
    base: tuple[str, ...],
    verb_lemma: str,
    context: Iterable[str],
    table: EmbeddingTable,
    disc: DiscretizationConfig,
) -> Observation:
    vec = mention_vector(verb_lemma, context, table)
    if vec is None:
        return base + (ABSENT,) * table.dimension
    return base + discretize(vec, disc)


def observe_mention(
    mention: VerbMention,
    table: EmbeddingTable,
    disc: DiscretizationConfig,
    cfg: MentionConfig = DEFAULT_MENTION_CONFIG,
) -> Observation:
    """Observation columns for one story verb mention."""
    dobj, iobj = _object_columns(mention.dependents, cfg)
    context = [l for _, l in mention.dependents]
    return _with_bins((mention.lemma, dobj, iobj), mention.lemma, context, table, disc)


def observe_ed(
    ed: EventDescription,
    table: EmbeddingTable,
    disc: DiscretizationConfig,
    cfg: MentionConfig = DEFAULT_MENTION_CONFIG,
) -> Observation:
    """Observation columns for one event description.

    The bin context is the ED's head nouns. Raises ValueError for EDs without
    a verbal token; sequence builders exclude those upstream.
    """
    verb = ed.main_verb()
    if verb is None:
        raise ValueError(f"event description {ed.index} has no verbal token")
    dobj, iobj = _object_columns(ed.verb_dependents(cfg), cfg)
    return _with_bins((verb.lemma, dobj, iobj), verb.lemma, ed.head_nouns(cfg), table, disc)


def esd_training_sequences(
    docs: Sequence[EsdDocument],
    table: EmbeddingTable,
    disc: DiscretizationConfig,
    cfg: MentionConfig = DEFAULT_MENTION_CONFIG,
) -> list[LabeledSequence]:
    """One training sequence per ESD: its script EDs in order.

    Non-script EDs are excluded; EDs without a verb are skipped with a
    warning. ESDs contributing no usable ED are dropped.
    """
    sequences = []
    for doc in docs:
        obs: list[Observation] = []
        labels: list[str] = []
        for ed in doc.script_eds():
            if ed.main_verb() is None:
                logger.warning(
                    "document %s: ED %d (%s) has no verb; skipped",
                    doc.doc_id,
                    ed.index,
                    ed.event_type,
                )
                continue
            obs.append(observe_ed(ed, table, disc, cfg))
            labels.append(ed.event_type)
        if obs:
            sequences.append((obs, labels))
    return sequences


def story_decode_sequence(
    story: Story,
    mentions: Sequence[VerbMention],
    table: EmbeddingTable,
    disc: DiscretizationConfig,
    cfg: MentionConfig = DEFAULT_MENTION_CONFIG,
) -> list[Observation]:
    """Observations for the given mentions of one story, textual order."""
    ordered = sorted(mentions, key=lambda m: (m.sentence, m.token_index))
    return [observe_mention(m, table, disc, cfg) for m in ordered]


def training_label_set(sequences: Sequence[LabeledSequence]) -> tuple[str, ...]:
    """Distinct labels of the training sequences in first-appearance order."""
    seen: dict[str, None] = {}
    for _, labels in sequences:
        for label in labels:
            seen.setdefault(label)
    return tuple(seen)


@dataclass(frozen=True)
class ScenarioStats:
    """Lexical statistics of one scenario's ESDs.

    verb_lemmas holds the lemmas of verbal tokens in the scenario's EDs.
    term_frequencies counts every token lemma, treating all ESDs of the
    scenario as one document. document_frequencies and n_scenarios are shared
    across the scenario set and feed the idf term.
    """

    scenario: str
    verb_lemmas: frozenset[str]
    term_frequencies: Mapping[str, int]
    document_frequencies: Mapping[str, int]
    n_scenarios: int


def build_scenario_stats(docs: Sequence[EsdDocument]) -> dict[str, ScenarioStats]:
    """Per-scenario statistics over a set of ESD documents."""
    if not docs:
        raise ValueError("no ESD documents to build scenario statistics from")
    from .corpus import is_verbal  # local import keeps the module header short

    tf: dict[str, Counter] = {}
    verbs: dict[str, set[str]] = {}
    for doc in docs:
        counts = tf.setdefault(doc.scenario, Counter())
        vset = verbs.setdefault(doc.scenario, set())
        for ed in doc.eds:
            for tok in ed.tokens:
                counts[tok.lemma] += 1
                if is_verbal(tok.pos):
                    vset.add(tok.lemma)
    df: Counter = Counter()
    for counts in tf.values():
        for lemma in counts:
            df[lemma] += 1
    n = len(tf)
    stats = {}
    for scenario, counts in tf.items():
        if not counts:
            logger.warning("scenario %r has no tokens; statistics are empty", scenario)
        stats[scenario] = ScenarioStats(
            scenario=scenario,
            verb_lemmas=frozenset(verbs[scenario]),
            term_frequencies=dict(counts),
            document_frequencies=df,
            n_scenarios=n,
        )
    return stats


def tfidf(lemmas: Iterable[str], stats: ScenarioStats) -> float:
    """Sum of tf * ln(N / df) over `lemmas` for this scenario's document.

    Lemmas unseen across all scenarios (df = 0) contribute 0.
    """
    score = 0.0
    for lemma in lemmas:
        df = stats.document_frequencies.get(lemma, 0)
        if df == 0:
            continue
        tf = stats.term_frequencies.get(lemma, 0)
        if tf == 0:
            continue
        score += tf * math.log(stats.n_scenarios / df)
    return score


def mention_tfidf(mention: VerbMention, stats: ScenarioStats) -> float:
    """tf-idf summed over a mention's verb lemma and dependent lemmas."""
    return tfidf((mention.lemma,) + tuple(l for _, l in mention.dependents), stats)
