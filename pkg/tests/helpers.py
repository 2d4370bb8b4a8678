"""Random preference tables for property tests."""
from __future__ import annotations

import random

from teachdim._bits import members
from teachdim.hypotheses import realizable_version_spaces
from teachdim.preference import (
    VersionSpacePattern,
    build_const,
    build_global,
    build_gvs,
    build_local_hamming,
    build_local_table,
    build_lvs,
)


def random_sigma(rng: random.Random, cls, family: str, levels: int = 3):
    m = cls.m
    r = lambda: rng.randrange(levels)  # noqa: E731
    if family == "const":
        return build_const(cls, r())
    if family == "global":
        return build_global(cls, [r() for _ in range(m)])
    if family == "local":
        if rng.random() < 0.2:
            return build_local_hamming(cls)
        return build_local_table(cls, [[r() for _ in range(m)] for _ in range(m)])
    spaces = realizable_version_spaces(cls)
    picks = rng.sample(spaces, min(len(spaces), rng.randint(1, 5)))
    if family == "gvs":
        pats = []
        for H in picks:
            opt = 0 if rng.random() < 0.6 else rng.randrange(cls.full + 1) & ~H
            pats.append((VersionSpacePattern(H, opt), [rng.choice([None, 0, 1, 2]) for _ in range(m)]))
        return build_gvs(cls, pats, default=r())
    if family == "lvs":
        ents = []
        for H in picks:
            cur = rng.choice([None] + list(range(m)))
            ents.append((cur, VersionSpacePattern(H, 0), [rng.choice([None, 0, 1, 2]) for _ in range(m)]))
        return build_lvs(cls, ents, default=r())
    raise ValueError(family)


def random_collusion_free_gvs(rng: random.Random, cls, h0: int, tries: int = 20):
    from teachdim.preference import is_collusion_free

    for _ in range(tries):
        s = random_sigma(rng, cls, "gvs")
        if is_collusion_free(s, cls, h0).holds:
            return s
    return None


def mask_names(cls, mask):
    return {cls.hypothesis_name(i) for i in members(mask)}


def dense_lvs(rng: random.Random, cls, levels: int = 3):
    """An lvs table with its own random row for every (realizable H, current h)."""
    entries = []
    for H in realizable_version_spaces(cls):
        for h in range(cls.m):
            entries.append((h, VersionSpacePattern(H, 0), [rng.randrange(levels) for _ in range(cls.m)]))
    return build_lvs(cls, entries, default=0)
