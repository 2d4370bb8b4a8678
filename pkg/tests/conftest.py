from __future__ import annotations

import random

import pytest

from teachdim.hypotheses import random_class

CORPUS_SIZE = 220


def make_corpus(seed: int = 20201, size: int = CORPUS_SIZE, n_max: int = 4, m_max: int = 6):
    rng = random.Random(seed)
    out = []
    while len(out) < size:
        n = rng.randint(1, n_max)
        m = rng.randint(1, min(m_max, 2 ** n))
        out.append(random_class(rng, n, m))
    return out


@pytest.fixture(scope="session")
def corpus():
    return make_corpus()


@pytest.fixture(scope="session")
def small_corpus():
    return make_corpus(seed=7, size=80, n_max=3, m_max=5)
