"""Exact teaching-complexity engines.

``d_sigma`` and ``td_of_sigma`` solve the teacher/learner minimax game by
iterative deepening over memoized states (version space, current hypothesis).
The classical dimensions (VCD, wc-TD, RTD, NCTD) are exhaustive searches over
instance subsets.  Everything returns exact integers.
"""
from __future__ import annotations

import enum
import itertools
import math
import os
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Any, Iterable, Iterator, Mapping, Sequence

from ._bits import lowest, mask_of, members, popcount
from .errors import DomainError, InputError, PreconditionError, ResourceError
from .hypotheses import HypothesisClass, LabeledExample
from .preference import FamilyVerdict, PreferenceFunction, VersionSpacePattern, build_global, build_gvs

SIGMA_GLOBAL_CAP = 7
FALLBACK_BUDGET = 20_000_000


class Unbounded(enum.Enum):
    INFINITY = "infinity"


INFINITY = Unbounded.INFINITY


def default_budget() -> int:
    raw = os.environ.get("TEACHDIM_BUDGET_NODES")
    if raw:
        try:
            val = int(raw)
        except ValueError:
            raise InputError(f"TEACHDIM_BUDGET_NODES must be an integer, got {raw!r}") from None
        if val < 1:
            raise InputError("TEACHDIM_BUDGET_NODES must be positive")
        return val
    return FALLBACK_BUDGET


def _jsonable(obj: Any) -> Any:
    if isinstance(obj, LabeledExample):
        return [obj.instance, obj.label]
    if isinstance(obj, Unbounded):
        return obj.value
    if isinstance(obj, (frozenset, set)):
        return sorted(_jsonable(o) for o in obj)
    if isinstance(obj, Mapping):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(o) for o in obj]
    if isinstance(obj, FamilyVerdict):
        return obj.to_json()
    return obj


@dataclass(frozen=True)
class DimensionResult:
    measure: str
    value: int | Unbounded
    bound_kind: str = "exact"
    witness: Any = None
    details: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        out = {
            "measure": self.measure,
            "value": _jsonable(self.value),
            "bound_kind": self.bound_kind,
            "witness": _jsonable(self.witness),
        }
        if self.details:
            out["details"] = _jsonable(self.details)
        return out


@dataclass(frozen=True)
class TeacherMapping:
    """T(h) for every hypothesis, each set labelled by its own hypothesis."""

    assignment: tuple[frozenset[LabeledExample], ...]

    @classmethod
    def from_dict(cls_, hc: HypothesisClass, T: Mapping[int, Iterable]) -> "TeacherMapping":
        sets = []
        for h in range(hc.m):
            if h not in T:
                raise InputError(f"teacher mapping lacks hypothesis {hc.hypothesis_name(h)}")
            S = frozenset(LabeledExample(*z) for z in T[h])
            for x, y in S:
                hc.check_instance(x)
                if hc.label(h, x) != y:
                    raise InputError(
                        f"T({hc.hypothesis_name(h)}) holds ({hc.instance_name(x)},{y}) which contradicts it"
                    )
            sets.append(S)
        extra = set(T) - set(range(hc.m))
        if extra:
            raise InputError(f"teacher mapping names unknown hypotheses {sorted(extra)}")
        return cls_(tuple(sets))

    def __getitem__(self, h: int) -> frozenset[LabeledExample]:
        return self.assignment[h]

    def max_size(self) -> int:
        return max((len(s) for s in self.assignment), default=0)

    def as_dict(self) -> dict[int, frozenset[LabeledExample]]:
        return dict(enumerate(self.assignment))


def _as_mapping(cls: HypothesisClass, T) -> TeacherMapping:
    return T if isinstance(T, TeacherMapping) else TeacherMapping.from_dict(cls, T)


# the steering game


class _Steering:
    """Memoized answers to "can the teacher force ``target`` within b examples"."""

    def __init__(self, cls: HypothesisClass, sigma: PreferenceFunction, target: int, budget: int):
        self.sigma = sigma
        self.target = target
        self.tbit = 1 << target
        row = cls.rows[target]
        self.moves = [(x, cls.agree_mask(x, row[x])) for x in range(cls.n)]
        self.labels = row
        self.keyed = sigma.uses_current
        self.lo: dict[tuple[int, int], int] = {}
        self.hi: dict[tuple[int, int], int] = {}
        self.budget = budget
        self.nodes = 0

    def within(self, H: int, h: int, b: int) -> bool:
        if h == self.target:
            return True
        return self.forced(H, h, b)

    def forced(self, H: int, h: int, b: int) -> bool:
        """Ignores the h == target shortcut, so h0 = target needs an example."""
        if b <= 0:
            return False
        key = (H, h if self.keyed else -1)
        hi = self.hi.get(key)
        if hi is not None and hi <= b:
            return True
        if self.lo.get(key, 0) >= b:
            return False
        self.nodes += 1
        if self.nodes > self.budget:
            raise ResourceError(f"steering search exceeded {self.budget} nodes", reason="node-budget")
        ok = any(self._move_ok(H & mask, h, b) for _, mask in self.moves)
        if ok:
            self.hi[key] = b
        else:
            self.lo[key] = b
        return ok

    def _move_ok(self, H2: int, h: int, b: int) -> bool:
        C = self.sigma.argmin_mask(H2, h)
        if C == self.tbit:
            return True
        if b == 1:
            return False
        rest = C & ~self.tbit
        if not self.keyed:
            return self.within(H2, lowest(rest), b - 1)
        return all(self.within(H2, c, b - 1) for c in members(rest))

    def value(self, H: int, h: int, cap: int, *, forced: bool = False) -> int | Unbounded:
        if h == self.target and not forced:
            return 0
        for b in range(1, cap + 1):
            if self.forced(H, h, b):
                return b
        # showing all n instances pins H to the target, so D never exceeds n
        return INFINITY

    def witness(self, H: int, h: int, d: int, cap: int) -> tuple[LabeledExample, ...]:
        """Follow an optimal teacher against the lowest-index non-target reply."""
        return self.path(H, h, d, cap, "lowest")[0]

    def path(self, H: int, h: int, d: int, cap: int, reply: str):
        """Optimal teacher play against the lowest-index reply or against the
        reply with the largest remaining cost; returns (examples, replies)."""
        seq, replies = [], []
        while True:
            for x, mask in self.moves:
                H2 = H & mask
                if self._move_ok(H2, h, d):
                    break
            else:  # pragma: no cover - d was certified
                raise AssertionError("no certified move")
            seq.append(LabeledExample(x, self.labels[x]))
            C = self.sigma.argmin_mask(H2, h)
            rest = C & ~self.tbit
            if not rest:
                replies.append(self.target)
                return tuple(seq), tuple(replies)
            if reply == "worst":
                h = max(members(rest), key=lambda c: (self.value(H2, c, cap), -c))
            else:
                h = lowest(rest)
            replies.append(h)
            H = H2
            d = self.value(H, h, cap)


def candidate_set(cls: HypothesisClass, sigma: PreferenceFunction, H: int, h: int,
                  z: LabeledExample) -> frozenset[int]:
    sigma.bind_check(cls)
    H2 = H & cls.example_mask(LabeledExample(*z))
    if not H2:
        raise DomainError(f"example {tuple(z)} eliminates every hypothesis", reason="eliminates-all")
    return sigma.argmin_set(H2, h)


def d_sigma(cls: HypothesisClass, sigma: PreferenceFunction, H: int, h: int, target: int, *,
            budget: int | None = None) -> int | Unbounded:
    """Minimax number of examples to steer the learner at (H, h) onto target."""
    sigma.bind_check(cls)
    cls.check_hypothesis(h)
    cls.check_hypothesis(target)
    if not (H >> target) & 1:
        raise DomainError("target is not in the version space", reason="target-outside")
    if h == target:
        return 0
    game = _Steering(cls, sigma, target, budget or default_budget())
    return game.value(H, h, cls.n)


def initial_target_cost(cls: HypothesisClass, sigma: PreferenceFunction, h0: int, *,
                        budget: int | None = None) -> int | Unbounded:
    """Cost of keeping the learner at h0 when h0 is itself the target.

    The learner has to be shown at least one example and still end on h0,
    except in a one-hypothesis class where there is nothing to teach."""
    if cls.m == 1:
        return 0
    game = _Steering(cls, sigma, h0, budget or default_budget())
    return game.value(cls.full, h0, cls.n, forced=True)


def td_of_sigma(cls: HypothesisClass, sigma: PreferenceFunction, h0: int, *,
                include_initial: bool = True, budget: int | None = None,
                targets: Iterable[int] | None = None) -> DimensionResult:
    sigma.bind_check(cls)
    cls.check_hypothesis(h0)
    budget = budget or default_budget()
    per: dict[int, int | Unbounded] = {}
    wit: dict[int, tuple[LabeledExample, ...]] = {}
    nodes = 0
    for t in (range(cls.m) if targets is None else targets):
        cls.check_hypothesis(t)
        if t == h0 and not include_initial:
            continue
        game = _Steering(cls, sigma, t, budget)
        forced = t == h0 and cls.m > 1
        if t == h0 and cls.m == 1:
            v: int | Unbounded = 0
        else:
            v = game.value(cls.full, h0, cls.n, forced=forced)
        per[t] = v
        if isinstance(v, int):
            wit[t] = game.witness(cls.full, h0, v, cls.n) if v > 0 else ()
        nodes += game.nodes
    vals = list(per.values())
    if any(v is INFINITY for v in vals):
        value: int | Unbounded = INFINITY
    else:
        value = max(vals, default=0)
    return DimensionResult(
        "td_sigma", value, "exact", wit,
        {"per_target": per, "h0": h0, "include_initial": include_initial, "family": sigma.family, "nodes": nodes},
    )


def teaching_path(cls: HypothesisClass, sigma: PreferenceFunction, h0: int, target: int, *,
                  reply: str = "lowest", budget: int | None = None):
    """An optimal teaching sequence from h0 together with the learner's replies.

    With ``reply="worst"`` the learner always moves to the candidate that is
    most expensive to recover from, so the path has exactly the minimax length."""
    sigma.bind_check(cls)
    if reply not in ("lowest", "worst"):
        raise InputError(f"unknown reply rule {reply!r}")
    if cls.m == 1:
        return (), ()
    game = _Steering(cls, sigma, target, budget or default_budget())
    d = game.value(cls.full, h0, cls.n, forced=target == h0)
    if d is INFINITY:
        raise DomainError("target cannot be reached", reason="unreachable")
    return game.path(cls.full, h0, d, cls.n, reply)


def td_at_most(cls: HypothesisClass, sigma: PreferenceFunction, h0: int, b: int, *,
               include_initial: bool = True, budget: int | None = None) -> bool:
    """True iff every target can be reached within b examples; stops at the first failure."""
    budget = budget or default_budget()
    if cls.m == 1:
        return b >= 0
    for t in range(cls.m):
        if t == h0 and not include_initial:
            continue
        game = _Steering(cls, sigma, t, budget)
        if not game.forced(cls.full, h0, b):
            return False
    return True


def witness_mapping(result: DimensionResult) -> dict[int, frozenset[LabeledExample]]:
    """Per-target example sets of a td_of_sigma result."""
    return {t: frozenset(seq) for t, seq in result.witness.items()}


# classical dimensions


def _diff_masks(cls: HypothesisClass, h: int, within: int) -> list[int]:
    code = cls.code(h)
    return sorted({code ^ cls.code(o) for o in members(within) if o != h})


def min_teaching_set(cls: HypothesisClass, h: int, within: int | None = None) -> DimensionResult:
    cls.check_hypothesis(h)
    within = cls.full if within is None else within
    if not (within >> h) & 1:
        raise DomainError("hypothesis is not in the given subclass", reason="outside")
    diffs = _diff_masks(cls, h, within)
    if not diffs:
        return DimensionResult("min_teaching_set", 0, "exact", ())
    for k in range(1, cls.n + 1):
        for combo in itertools.combinations(range(cls.n), k):
            cm = mask_of(combo)
            if all(d & cm for d in diffs):
                return DimensionResult("min_teaching_set", k, "exact", cls.examples_of(h, combo))
    raise AssertionError("distinct hypotheses are always separable")  # pragma: no cover


def wc_td(cls: HypothesisClass) -> DimensionResult:
    sets = {h: min_teaching_set(cls, h).witness for h in range(cls.m)}
    return DimensionResult("wc_td", max(len(s) for s in sets.values()), "exact", sets)


def rtd(cls: HypothesisClass) -> DimensionResult:
    """Peel every hypothesis of minimal teaching-set size, round by round."""
    remaining = cls.full
    rounds = []
    value = 0
    while remaining:
        costs = {h: min_teaching_set(cls, h, remaining) for h in members(remaining)}
        k = min(r.value for r in costs.values())
        layer = [h for h, r in costs.items() if r.value == k]
        rounds.append({"size": k, "hypotheses": layer, "sets": {h: costs[h].witness for h in layer}})
        value = max(value, k)
        remaining &= ~mask_of(layer)
    order = [h for r in rounds for h in r["hypotheses"]]
    return DimensionResult("rtd", value, "exact", order, {"rounds": rounds})


def is_nonclashing(cls: HypothesisClass, T) -> FamilyVerdict:
    T = _as_mapping(cls, T)
    consistent_with = []
    for h in range(cls.m):
        S = T[h]
        mask = cls.full
        for z in S:
            mask &= cls.example_mask(z)
        consistent_with.append(mask)
    for h in range(cls.m):
        for hp in range(h + 1, cls.m):
            if (consistent_with[h] >> hp) & 1 and (consistent_with[hp] >> h) & 1:
                cex = {
                    "kind": "clash", "h": h, "h_prime": hp,
                    "T_h": sorted(map(list, T[h])), "T_h_prime": sorted(map(list, T[hp])),
                }
                return FamilyVerdict("non-clashing", False, cex, f"{cls.m * (cls.m - 1) // 2} pairs")
    return FamilyVerdict("non-clashing", True, None, f"{cls.m * (cls.m - 1) // 2} pairs")


def _nonclashing_at(cls: HypothesisClass, k: int, counter: list[int], budget: int) -> dict[int, int] | None:
    n, m = cls.n, cls.m
    size = min(k, n)
    cands = [mask_of(c) for c in itertools.combinations(range(n), size)]
    codes = [cls.code(h) for h in range(m)]
    assign: dict[int, int] = {}

    def solve(domains: dict[int, list[int]]) -> bool:
        if not domains:
            return True
        h = min(domains, key=lambda u: (len(domains[u]), u))
        for A in domains[h]:
            counter[0] += 1
            if counter[0] > budget:
                raise ResourceError(f"no-clash search exceeded {budget} nodes", reason="node-budget",
                                    lower=k, upper=n)
            nxt = {}
            for u, dom in domains.items():
                if u == h:
                    continue
                d = codes[h] ^ codes[u]
                if d & A:
                    nxt[u] = dom
                    continue
                nd = [B for B in dom if d & B]
                if not nd:
                    break
                nxt[u] = nd
            else:
                assign[h] = A
                if solve(nxt):
                    return True
                del assign[h]
        return False

    if solve({h: cands for h in range(m)}):
        return dict(assign)
    return None


def nctd(cls: HypothesisClass, max_size_hint: int | None = None, *, budget: int | None = None,
         start: int = 0) -> DimensionResult:
    """Smallest k admitting a non-clashing mapping with |T(h)| <= k.

    Enlarging a teaching set never creates a clash, so each level only tries
    sets of size exactly min(k, n)."""
    budget = budget or default_budget()
    counter = [0]
    top = cls.n if max_size_hint is None else min(cls.n, max_size_hint)
    for k in range(start, top + 1):
        found = _nonclashing_at(cls, k, counter, budget)
        if found is not None:
            T = {h: frozenset(cls.examples_of(h, members(A))) for h, A in sorted(found.items())}
            return DimensionResult("nctd", k, "exact", T, {"nodes": counter[0]})
    return DimensionResult("nctd", top + 1, "lower", None, {"nodes": counter[0]})


def nctd_powerset_lower_bound(k: int) -> int:
    return (k + 1) // 2


def vcd(cls: HypothesisClass, X_subset: Iterable[int] | None = None) -> DimensionResult:
    xs = sorted(set(range(cls.n) if X_subset is None else (cls.check_instance(x) for x in X_subset)))
    codes = [cls.code(h) for h in range(cls.m)]
    top = min(len(xs), cls.m.bit_length() - 1)
    for k in range(top, 0, -1):
        for combo in itertools.combinations(xs, k):
            cm = mask_of(combo)
            if len({c & cm for c in codes}) == 1 << k:
                return DimensionResult("vcd", k, "exact", list(combo))
    return DimensionResult("vcd", 0, "exact", [])


# preference orders and counting


def weak_orders(m: int) -> Iterator[tuple[int, ...]]:
    """Every weak order on range(m) as a rank vector (rank 0 is most preferred)."""
    ranks = [0] * m

    def rec(remaining: int, level: int):
        if not remaining:
            yield tuple(ranks)
            return
        sub = remaining
        while sub:
            for i in members(sub):
                ranks[i] = level
            yield from rec(remaining & ~sub, level + 1)
            sub = (sub - 1) & remaining

    yield from rec((1 << m) - 1, 0)


def preference_order_cost(cls: HypothesisClass, ranks: Sequence) -> int:
    """Teaching in preference order: each h is separated from every h' ranked at
    least as well, with at least one example unless the class is a singleton."""
    if cls.m == 1:
        return 0
    worst = 0
    for h in range(cls.m):
        rival = mask_of(i for i in range(cls.m) if ranks[i] <= ranks[h])
        worst = max(worst, max(1, min_teaching_set(cls, h, rival).value))
    return worst


def sigma_td_global(cls: HypothesisClass, h0: int, *, cap: int = SIGMA_GLOBAL_CAP,
                    include_initial: bool = True, budget: int | None = None) -> DimensionResult:
    """Minimum of td_of_sigma over every global preference (weak order)."""
    cls.check_hypothesis(h0)
    if cls.m > cap:
        raise ResourceError(
            f"{count_pref_relations(cls.m)} weak orders on {cls.m} hypotheses exceeds the cap m <= {cap}; "
            "rtd computes the same value",
            reason="class-too-large",
        )
    best: int | None = None
    best_order = None
    seen = 0
    for ranks in weak_orders(cls.m):
        seen += 1
        sigma = build_global(cls, ranks)
        if best is None:
            best = td_of_sigma(cls, sigma, h0, include_initial=include_initial, budget=budget).value
            best_order = ranks
            continue
        if best == 0:
            continue
        if td_at_most(cls, sigma, h0, best - 1, include_initial=include_initial, budget=budget):
            best = td_of_sigma(cls, sigma, h0, include_initial=include_initial, budget=budget).value
            best_order = ranks
    return DimensionResult("sigma_td_global", best, "exact", list(best_order), {"orders": seen})


@lru_cache(maxsize=None)
def _ordered_bell(m: int) -> int:
    # compositions grouped by their first part t; the multinomial splits as C(m, t) * rest
    if m == 0:
        return 1
    return sum(math.comb(m, t) * _ordered_bell(m - t) for t in range(1, m + 1))


def count_pref_relations(m: int) -> int:
    if isinstance(m, bool) or not isinstance(m, int) or m < 1:
        raise InputError("m must be a positive integer")
    if m > 500:
        # keep the recursion shallow for very large m
        for i in range(0, m, 200):
            _ordered_bell(i)
    return _ordered_bell(m)


def powerset_td_lower_bound(d: int) -> int:
    """Smallest k with (2d)^(k+1) > 2^d, in exact integers."""
    if isinstance(d, bool) or not isinstance(d, int) or d < 1:
        raise InputError("d must be a positive integer")
    base = 2 * d
    bound = 1 << d
    k = max(0, int(d / math.log2(base)) - 2)
    while base ** (k + 1) <= bound:
        k += 1
    while k > 0 and base ** k > bound:
        k -= 1
    return k


# batch teachers as preferences


def sigma_from_teacher(cls: HypothesisClass, T, *, budget: int | None = None) -> PreferenceFunction:
    """A gvs preference that ranks h at 0 on every H(S) with T(h) <= S and S
    consistent with h, and everything else at 1."""
    T = _as_mapping(cls, T)
    verdict = is_nonclashing(cls, T)
    if not verdict.holds:
        raise PreconditionError("teacher mapping clashes", reason="clash", counterexample=verdict.counterexample)
    budget = budget or default_budget()
    owner: dict[int, int] = {}
    patterns = []
    for h in range(cls.m):
        used = {x for x, _ in T[h]}
        base = cls.full
        for z in T[h]:
            base &= cls.example_mask(z)
        free = [x for x in range(cls.n) if x not in used]
        row = cls.rows[h]
        for r in range(len(free) + 1):
            for extra in itertools.combinations(free, r):
                H = base
                for x in extra:
                    H &= cls.agree_mask(x, row[x])
                if H in owner:
                    if owner[H] != h:
                        raise PreconditionError("two hypotheses claim the same version space", reason="clash")
                    continue
                owner[H] = h
                if len(owner) > budget:
                    raise ResourceError("too many version-space patterns", reason="pattern-budget")
                ranks: list = [None] * cls.m
                ranks[h] = 0
                patterns.append((VersionSpacePattern(H, 0), ranks))
    return build_gvs(cls, patterns, default=1)
