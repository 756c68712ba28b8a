from __future__ import annotations

import random
from pathlib import Path

import pytest

from evalkit import Corpus, MetricConfig, Sample, load_corpus

DATA_DIR = Path(__file__).parent / "data"

# Flattened one-line form of a multi-line snippet: the storage convention of
# the shellcode corpora this tool targets.
NL_MARKER = " \\n "


@pytest.fixture(scope="session")
def mini_corpus_path() -> Path:
    return DATA_DIR / "mini_corpus.jsonl"


@pytest.fixture(scope="session")
def mini_corpus(mini_corpus_path) -> Corpus:
    return load_corpus(mini_corpus_path, "jsonl")


@pytest.fixture(scope="session")
def default_config() -> MetricConfig:
    return MetricConfig()


@pytest.fixture(scope="session")
def epsilon_config() -> MetricConfig:
    return MetricConfig(bleu_smoothing="epsilon")


def make_sample(i: int, **overrides) -> Sample:
    fields = {
        "id": f"s{i:04d}",
        "intent": f"intent {i}",
        "reference": f"ref {i}",
        "prediction": f"pred {i}",
        "sc": None,
        "language": "other",
    }
    fields.update(overrides)
    return Sample(**fields)


def random_corpus(n: int, seed: int = 0, labeled: bool = True) -> Corpus:
    rng = random.Random(seed)
    samples = []
    for i in range(n):
        sc = rng.choice((0, 1)) if labeled else None
        words = [rng.choice(("mov", "add", "xor", "push", "pop", "eax", "ebx", "5"))
                 for _ in range(rng.randint(1, 6))]
        pred = " ".join(words)
        ref = pred if sc == 1 and rng.random() < 0.5 else " ".join(reversed(words)) + " end"
        samples.append(make_sample(i, prediction=pred, reference=ref, sc=sc))
    return Corpus(tuple(samples))
