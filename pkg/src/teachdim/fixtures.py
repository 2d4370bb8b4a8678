"""Named fixtures: the Warmuth preference tables and teaching sequences, and a
small preference function that is not collusion-free."""
from __future__ import annotations

from .hypotheses import HypothesisClass, LabeledExample, class_from_strings, warmuth_class
from .preference import (
    PreferenceFunction,
    VersionSpacePattern,
    build_const,
    build_global,
    build_gvs,
    build_local_hamming,
    build_lvs,
)

# version space pairs in which each hypothesis is preferred (1-based names)
WARMUTH_GVS_PAIRS = {
    1: 6, 2: 7, 3: 8, 4: 9, 5: 10, 6: 9, 7: 10, 8: 6, 9: 7, 10: 8,
}

# optional companions of each hypothesis in the lvs table
WARMUTH_LVS_OPTIONAL = {
    1: (5, 6, 8, 10),
    2: (1, 7, 6, 9),
    3: (2, 7, 8, 10),
    4: (3, 6, 8, 9),
    5: (4, 7, 9, 10),
    6: (1, 4, 5, 9),
    7: (1, 2, 5, 10),
    8: (1, 2, 3, 6),
    9: (2, 3, 4, 7),
    10: (3, 4, 5, 8),
}

# teaching sequences by instance name (1-based), labels come from the target
_BATCH3 = {1: (1, 2, 4), 2: (2, 3, 5), 3: (1, 3, 4), 4: (2, 4, 5), 5: (1, 3, 5)}
WARMUTH_SEQUENCES = {
    "const": {**_BATCH3, **{h + 5: s for h, s in _BATCH3.items()}},
    "gvs": {
        1: (1, 2), 2: (2, 3), 3: (3, 4), 4: (4, 5), 5: (1, 5),
        6: (2, 4), 7: (3, 5), 8: (1, 4), 9: (2, 5), 10: (1, 3),
    },
    "local": {
        1: (1,), 2: (3,), 3: (3, 4), 4: (5, 4), 5: (5,),
        6: (4,), 7: (3, 5), 8: (4, 3), 9: (4, 5), 10: (5, 3),
    },
    "lvs": {
        1: (1,), 2: (2,), 3: (3,), 4: (4,), 5: (5,),
        6: (3,), 7: (4,), 8: (5,), 9: (1,), 10: (2,),
    },
}
WARMUTH_SEQUENCES["global"] = WARMUTH_SEQUENCES["const"]

WARMUTH_TD = {"const": 3, "global": 3, "gvs": 2, "local": 2, "lvs": 1}
WARMUTH_DIMENSIONS = {"vcd": 2, "wctd": 3, "rtd": 3, "nctd": 2}


def _zero_at(m: int, i: int) -> list:
    ranks: list = [None] * m
    ranks[i] = 0
    return ranks


def warmuth_gvs(cls: HypothesisClass | None = None) -> PreferenceFunction:
    cls = cls or warmuth_class()
    m = cls.m
    patterns = []
    for h, other in WARMUTH_GVS_PAIRS.items():
        i = h - 1
        patterns.append((VersionSpacePattern.of([i, other - 1]), _zero_at(m, i)))
        patterns.append((VersionSpacePattern.of([i]), _zero_at(m, i)))
    return build_gvs(cls, patterns, default=1)


def warmuth_lvs(cls: HypothesisClass | None = None) -> PreferenceFunction:
    cls = cls or warmuth_class()
    m = cls.m
    entries = []
    for h, opt in WARMUTH_LVS_OPTIONAL.items():
        i = h - 1
        pat = VersionSpacePattern.of([i], [o - 1 for o in opt])
        for cur in sorted({0, i}):
            entries.append((cur, pat, _zero_at(m, i)))
    return build_lvs(cls, entries, default=1)


def warmuth_sigmas(cls: HypothesisClass | None = None) -> dict[str, PreferenceFunction]:
    cls = cls or warmuth_class()
    return {
        "const": build_const(cls, 0),
        "global": build_global(cls, [0] * cls.m),
        "gvs": warmuth_gvs(cls),
        "local": build_local_hamming(cls),
        "lvs": warmuth_lvs(cls),
    }


def warmuth_sequence(family: str, target: int, cls: HypothesisClass | None = None) -> tuple[LabeledExample, ...]:
    """Sequence for 0-based ``target`` under the given family's table."""
    cls = cls or warmuth_class()
    xs = WARMUTH_SEQUENCES[family][target + 1]
    return tuple(LabeledExample(x - 1, cls.label(target, x - 1)) for x in xs)


def warmuth_teacher(cls: HypothesisClass | None = None) -> dict[int, frozenset[LabeledExample]]:
    cls = cls or warmuth_class()
    return {h: frozenset(warmuth_sequence("gvs", h, cls)) for h in range(cls.m)}


def adversarial_class() -> HypothesisClass:
    return class_from_strings(["00", "01", "10"], hypothesis_names=("a", "b", "c"))


def adversarial_sigma(cls: HypothesisClass | None = None) -> PreferenceFunction:
    """From c, the example (x0,0) leaves {a, b} and the learner settles on a.
    Repeating that example, which is consistent with a, moves it to b."""
    cls = cls or adversarial_class()
    ab = VersionSpacePattern.of([0, 1])
    return build_lvs(cls, [(0, ab, [1, 0, None]), (None, ab, [0, 1, None])], default=0)
