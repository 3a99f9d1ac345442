"""Word-vector table, verb-weighted mention vectors, interval discretization.

Mention vectors average the verb vector (counted twice) with one vector per
dependent or head-noun lemma; words missing from the table are skipped. Each
vector component is then discretized into one of three nominal symbols using a
threshold epsilon: below -epsilon, inside [-epsilon, epsilon], above epsilon.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import IO, Iterable, Sequence

import numpy as np

logger = logging.getLogger(__name__)

BIN_LOW = "low"
BIN_MID = "mid"
BIN_HIGH = "high"


class EmbeddingFormatError(ValueError):
    """Raised for malformed embedding files; carries the offending line number."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


@dataclass
class EmbeddingTable:
    """Whitespace-keyed vector table with a lowercase-first lookup policy."""

    dimension: int
    vectors: dict[str, np.ndarray]
    lowercase: bool = True

    def lookup(self, word: str) -> np.ndarray | None:
        """Vector for `word`, trying the lowercased form first, else raw case."""
        if self.lowercase:
            hit = self.vectors.get(word.lower())
            if hit is not None:
                return hit
        return self.vectors.get(word)

    def __contains__(self, word: str) -> bool:
        return self.lookup(word) is not None

    def __len__(self) -> int:
        return len(self.vectors)


def load_embeddings(source: str | IO[str], lowercase: bool = True) -> EmbeddingTable:
    """Load a plain-text vector table.

    The first line holds ``<count> <dimension>``; every following line holds a
    word and `dimension` floats, whitespace-separated. Duplicate words keep
    the first occurrence and log a warning. Dimension mismatches are errors.
    """
    lines = source.splitlines() if isinstance(source, str) else [l.rstrip("\n") for l in source]
    if not lines or not lines[0].strip():
        raise EmbeddingFormatError("missing header line", 1)
    header = lines[0].split()
    if len(header) != 2:
        raise EmbeddingFormatError(
            f"malformed header: expected '<count> <dimension>', got {lines[0]!r}", 1
        )
    try:
        declared_count, dimension = int(header[0]), int(header[1])
    except ValueError:
        raise EmbeddingFormatError(f"malformed header numbers in {lines[0]!r}", 1) from None
    if dimension < 1:
        raise EmbeddingFormatError(f"dimension must be positive, got {dimension}", 1)
    vectors: dict[str, np.ndarray] = {}
    for lineno, line in enumerate(lines[1:], 2):
        if not line.strip():
            continue
        parts = line.split()
        if len(parts) != dimension + 1:
            raise EmbeddingFormatError(
                f"expected 1 word and {dimension} values, got {len(parts)} fields", lineno
            )
        word = parts[0]
        try:
            vec = np.array([float(x) for x in parts[1:]], dtype=np.float64)
        except ValueError as exc:
            raise EmbeddingFormatError(str(exc), lineno) from None
        if word in vectors:
            logger.warning("duplicate embedding for %r (line %d); keeping the first", word, lineno)
            continue
        vectors[word] = vec
    if declared_count != len(vectors):
        logger.warning(
            "embedding header declares %d entries, file holds %d", declared_count, len(vectors)
        )
    return EmbeddingTable(dimension=dimension, vectors=vectors, lowercase=lowercase)


def mention_vector(
    verb_lemma: str, context_lemmas: Iterable[str], table: EmbeddingTable
) -> np.ndarray | None:
    """Average vector with the verb counted twice; None if no word is known.

    Equivalent to the plain average over the multiset {verb, verb} + contexts
    restricted to in-table words, so a dependent sharing the verb's lemma adds
    a third copy.
    """
    rows = []
    verb_vec = table.lookup(verb_lemma)
    if verb_vec is not None:
        rows.append(verb_vec)
        rows.append(verb_vec)
    for lemma in context_lemmas:
        vec = table.lookup(lemma)
        if vec is not None:
            rows.append(vec)
    if not rows:
        return None
    return np.mean(np.stack(rows), axis=0)


def cosine(u: np.ndarray, v: np.ndarray) -> float:
    """Cosine similarity in [-1, 1]; zero vectors compare as 0."""
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if u.shape != v.shape:
        raise ValueError(f"vector length mismatch: {u.shape} vs {v.shape}")
    nu = float(np.linalg.norm(u))
    nv = float(np.linalg.norm(v))
    if nu == 0.0 or nv == 0.0:
        return 0.0
    return float(min(1.0, max(-1.0, float(np.dot(u, v)) / (nu * nv))))


@dataclass(frozen=True)
class DiscretizationConfig:
    """Threshold for the three-way component binning; middle bin is closed."""

    epsilon: float = 0.05

    def __post_init__(self):
        if self.epsilon <= 0:
            raise ValueError(f"epsilon must be positive, got {self.epsilon}")


DEFAULT_EPSILON_GRID = (0.01, 0.02, 0.05, 0.1, 0.2)


def discretize(vector: np.ndarray, cfg: DiscretizationConfig) -> tuple[str, ...]:
    """Map each component to low / mid / high around [-epsilon, epsilon]."""
    out = []
    for x in np.asarray(vector, dtype=np.float64):
        if x < -cfg.epsilon:
            out.append(BIN_LOW)
        elif x > cfg.epsilon:
            out.append(BIN_HIGH)
        else:
            out.append(BIN_MID)
    return tuple(out)


def tune_epsilon(
    train_docs: Sequence,
    dev_docs: Sequence,
    candidates: Sequence[float],
    table: EmbeddingTable,
    train_config=None,
    use_transitions: bool = True,
) -> float:
    """Pick the discretization threshold by held-out label accuracy.

    For every candidate epsilon a fresh sequence model is trained on
    `train_docs` (ESD documents) and decoded on `dev_docs`; the candidate with
    the highest micro accuracy over dev event labels wins, ties going to the
    smallest epsilon.
    """
    # Imported here: features/crf depend on this module for featurization.
    from . import crf as crf_mod
    from . import features as features_mod

    if not candidates:
        raise ValueError("no epsilon candidates given")
    if not train_docs:
        raise ValueError("no training documents for epsilon tuning")
    if not dev_docs:
        raise ValueError("no development documents for epsilon tuning")
    cfg = train_config if train_config is not None else crf_mod.TrainConfig()
    best_eps: float | None = None
    best_acc = -1.0
    for eps in sorted(candidates):
        disc = DiscretizationConfig(epsilon=eps)
        train_seqs = features_mod.esd_training_sequences(train_docs, table, disc)
        dev_seqs = features_mod.esd_training_sequences(dev_docs, table, disc)
        if not train_seqs or not dev_seqs:
            raise ValueError("epsilon tuning requires non-empty featurized sequences")
        labels = features_mod.training_label_set(train_seqs)
        model = crf_mod.train(train_seqs, labels, cfg, use_transitions=use_transitions)
        correct = 0
        total = 0
        for obs, gold in dev_seqs:
            pred, _ = crf_mod.viterbi(model, obs)
            correct += sum(1 for p, g in zip(pred, gold) if p == g)
            total += len(gold)
        acc = correct / total if total else 0.0
        logger.info("epsilon %g: dev accuracy %.4f (%d labels)", eps, acc, total)
        if acc > best_acc:
            best_acc = acc
            best_eps = eps
    assert best_eps is not None
    return best_eps
