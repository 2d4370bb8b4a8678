"""The teacher/learner interaction loop with explicit tie handling."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

from ._bits import lowest, members
from .errors import InconsistentExampleError, InputError
from .hypotheses import HypothesisClass, LabeledExample
from .preference import PreferenceFunction

ADVERSARIAL = "adversarial"
LOWEST_INDEX = "lowest-index"
TIE_MODES = (ADVERSARIAL, LOWEST_INDEX)


@dataclass(frozen=True)
class LearnerState:
    current: int
    version_space: int
    history: tuple[LabeledExample, ...] = ()


@dataclass(frozen=True)
class Step:
    example: LabeledExample
    candidates: frozenset[int]
    chosen: int
    version_space_size: int


@dataclass(frozen=True)
class Trajectory:
    h0: int
    target: int
    steps: tuple[Step, ...]
    terminated: bool

    @property
    def steps_used(self) -> int:
        return len(self.steps)

    @property
    def final(self) -> int:
        return self.steps[-1].chosen if self.steps else self.h0

    def dump(self, cls: HypothesisClass) -> str:
        lines = []
        for t, s in enumerate(self.steps, start=1):
            cands = ",".join(cls.hypothesis_name(c) for c in sorted(s.candidates))
            x, y = s.example
            lines.append(
                f"t={t} z=({cls.instance_name(x)},{y}) H={s.version_space_size} "
                f"candidates={{{cands}}} chosen={cls.hypothesis_name(s.chosen)}"
            )
        return "\n".join(lines)

    def to_json(self, cls: HypothesisClass) -> dict:
        return {
            "h0": cls.hypothesis_name(self.h0),
            "target": cls.hypothesis_name(self.target),
            "terminated": self.terminated,
            "steps_used": self.steps_used,
            "steps": [
                {
                    "z": [cls.instance_name(s.example.instance), s.example.label],
                    "H": s.version_space_size,
                    "candidates": [cls.hypothesis_name(c) for c in sorted(s.candidates)],
                    "chosen": cls.hypothesis_name(s.chosen),
                }
                for s in self.steps
            ],
        }


def choose(candidates: int, tie_mode: str, target: int | None) -> int:
    if tie_mode == LOWEST_INDEX:
        return lowest(candidates)
    if tie_mode != ADVERSARIAL:
        raise InputError(f"unknown tie mode {tie_mode!r}")
    others = candidates & ~(1 << target) if target is not None else candidates
    return lowest(others) if others else target


def initial_state(cls: HypothesisClass, h0: int) -> LearnerState:
    cls.check_hypothesis(h0)
    return LearnerState(h0, cls.full, ())


def learner_step(cls: HypothesisClass, sigma: PreferenceFunction, state: LearnerState, z: LabeledExample,
                 tie_mode: str = ADVERSARIAL, target: int | None = None) -> tuple[LearnerState, frozenset[int]]:
    """One protocol round.  Adversarial mode picks the lowest-index candidate
    other than ``target`` when there is one."""
    sigma.bind_check(cls)
    z = LabeledExample(*z)
    H = state.version_space & cls.example_mask(z)
    if not H:
        raise InconsistentExampleError(f"example {z} leaves no consistent hypothesis")
    C = sigma.argmin_mask(H, state.current)
    chosen = choose(C, tie_mode, target)
    return LearnerState(chosen, H, state.history + (z,)), frozenset(members(C))


def run_protocol(cls: HypothesisClass, sigma: PreferenceFunction, h0: int, target: int,
                 sequence: Iterable[LabeledExample], tie_mode: str = ADVERSARIAL) -> Trajectory:
    sigma.bind_check(cls)
    cls.check_hypothesis(target)
    seq = [LabeledExample(*z) for z in sequence]
    for z in seq:
        cls.check_instance(z.instance)
        if cls.label(target, z.instance) != z.label:
            raise InputError(f"example {z} contradicts the target {cls.hypothesis_name(target)}",
                             reason="teacher-inconsistent")
    state = initial_state(cls, h0)
    if not seq and h0 == target:
        return Trajectory(h0, target, (), True)
    steps = []
    for z in seq:
        state, C = learner_step(cls, sigma, state, z, tie_mode, target)
        steps.append(Step(z, C, state.current, bin(state.version_space).count("1")))
        if state.current == target:
            return Trajectory(h0, target, tuple(steps), True)
    return Trajectory(h0, target, tuple(steps), False)


def parse_sequence(cls: HypothesisClass, text: str, target: int | None = None) -> tuple[LabeledExample, ...]:
    """Parse ``x3:1,x4:1`` style sequences; a bare instance takes the target's label."""
    out = []
    for tok in (t.strip() for t in text.replace(";", ",").split(",")):
        if not tok:
            continue
        name, sep, lab = tok.partition(":")
        x = cls.instance_index(name.strip())
        if sep:
            if lab.strip() not in ("0", "1"):
                raise InputError(f"bad label in {tok!r}")
            y = int(lab)
        elif target is not None:
            y = cls.label(target, x)
        else:
            raise InputError(f"example {tok!r} needs a label")
        out.append(LabeledExample(x, y))
    return tuple(out)
