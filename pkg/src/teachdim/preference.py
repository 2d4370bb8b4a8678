"""Preference functions sigma(h'; H, h) and checks on them.

A ``PreferenceFunction`` is bound to one class.  It stores one of a few table
shapes: a constant, a global rank vector, a local matrix (or Hamming
distance), pattern tables keyed on the version space (``gvs``), pattern tables
keyed on version space and current hypothesis (``lvs``), or the additive
composition of two win-stay lose-shift functions over a disjoint union.

Ranks are exact: ``int`` or ``fractions.Fraction``.  The learner's reply to a
version space ``H`` is ``argmin_mask(H, h)``, the set of minimal-rank members
of ``H`` as a bitmask.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Iterable, Sequence

from ._bits import mask_of, members
from .errors import BindingError, DomainError, InputError, ResourceError
from .hypotheses import (
    HypothesisClass,
    LabeledExample,
    disjoint_union,
    hamming,
    parse_hc,
    project,
    realizable_version_spaces,
)

FAMILIES = ("const", "global", "gvs", "local", "lvs")
CHECKABLE = FAMILIES + ("wsls",)
DEFAULT_ENUM_BUDGET = 2_000_000

Rank = "int | Fraction"


def _rank(v: Any):
    if isinstance(v, bool):
        raise InputError("boolean is not a rank")
    if isinstance(v, int):
        return v
    if isinstance(v, Fraction):
        return v.numerator if v.denominator == 1 else v
    if isinstance(v, float):
        if v != v or v in (float("inf"), float("-inf")):
            raise InputError("ranks must be finite")
        return _rank(Fraction(v))
    if isinstance(v, str):
        try:
            return _rank(Fraction(v))
        except (ValueError, ZeroDivisionError):
            pass
    raise InputError(f"invalid rank {v!r}")


def _rank_json(v):
    return v if isinstance(v, int) else f"{v.numerator}/{v.denominator}"


@dataclass(frozen=True)
class VersionSpacePattern:
    """Matches every H with ``required <= H <= required | optional``."""

    required: int
    optional: int = 0

    def __post_init__(self) -> None:
        if self.required < 0 or self.optional < 0:
            raise InputError("pattern masks must be nonnegative")
        if self.required & self.optional:
            raise InputError("required and optional hypotheses overlap")

    @classmethod
    def of(cls, required: Iterable[int], optional: Iterable[int] = ()) -> "VersionSpacePattern":
        return cls(mask_of(required), mask_of(optional))

    def matches(self, H: int) -> bool:
        return H & self.required == self.required and H & ~(self.required | self.optional) == 0

    def to_json(self) -> dict:
        return {"required": list(members(self.required)), "optional": list(members(self.optional))}

    @classmethod
    def from_json(cls, obj: dict, m: int) -> "VersionSpacePattern":
        try:
            req, opt = obj["required"], obj.get("optional", [])
        except (TypeError, KeyError):
            raise InputError("pattern needs a 'required' list") from None
        for i in list(req) + list(opt):
            if not isinstance(i, int) or not 0 <= i < m:
                raise InputError(f"pattern index {i!r} out of range")
        return cls.of(req, opt)


@dataclass(frozen=True)
class FamilyVerdict:
    family: str
    holds: bool
    counterexample: dict | None = None
    scope: str = ""

    def to_json(self) -> dict:
        return {"family": self.family, "holds": self.holds, "counterexample": self.counterexample, "scope": self.scope}


class PreferenceFunction:
    """A total, table-backed preference function bound to ``cls``."""

    def __init__(self, cls: HypothesisClass, family: str, kind: str, *, value=0, ranks=None,
                 matrix=None, entries=(), default_rank=1, parts=None) -> None:
        if family not in FAMILIES:
            raise InputError(f"unknown family {family!r}")
        self.cls = cls
        self.family = family
        self.kind = kind
        self.default_rank = _rank(default_rank)
        self.value = _rank(value)
        self.ranks = ranks
        self.matrix = matrix
        self.entries = tuple(entries)
        self.parts = parts
        self._cache: dict[tuple[int, int], int] = {}
        self._levels = None
        m = cls.m
        if kind == "global":
            self._levels = [_levels(ranks)]
        elif kind in ("local", "hamming"):
            self._levels = [_levels(row) for row in matrix]
        # exact patterns are looked up by mask; the rest are scanned
        self._exact: dict[tuple[int, int], list[int]] = {}
        self._loose: list[int] = []
        for pos, (cur, pat, _) in enumerate(self.entries):
            if pat.optional == 0:
                self._exact.setdefault((pat.required, -1 if cur is None else cur), []).append(pos)
            else:
                self._loose.append(pos)
        self._const_row = (self.value,) * m if kind == "const" else None

    # structure

    @property
    def uses_current(self) -> bool:
        """False when the table provably ignores the current hypothesis."""
        if self.kind in ("const", "global", "gvs"):
            return False
        if self.kind == "lvs":
            return any(cur is not None for cur, _, _ in self.entries)
        return True

    @property
    def uses_version_space(self) -> bool:
        return self.kind in ("gvs", "lvs", "union")

    def bind_check(self, cls: HypothesisClass) -> None:
        if cls is not self.cls and cls != self.cls:
            raise BindingError("preference function is bound to a different class")

    # evaluation

    def eval(self, hp: int, H: int, h: int):
        cls = self.cls
        cls.check_hypothesis(hp)
        cls.check_hypothesis(h)
        if H < 0 or H > cls.full:
            raise BindingError("version space mask does not fit the bound class")
        k = self.kind
        if k == "const":
            return self.value
        if k == "global":
            return self.ranks[hp]
        if k in ("local", "hamming"):
            return self.matrix[h][hp]
        if k == "union":
            a, b = self.parts
            Ha, Hb = project(a.cls, b.cls, H)
            i, j = divmod(hp, b.cls.m)
            ha, hb = divmod(h, b.cls.m)
            return a.eval(i, Ha, ha) + b.eval(j, Hb, hb)
        return self._table_ranks(H, h, (hp,))[0]

    def _matching(self, H: int, h: int) -> list[int]:
        pos = list(self._exact.get((H, -1), ()))
        if self.kind == "lvs":
            pos += self._exact.get((H, h), ())
        for p in self._loose:
            cur, pat, _ = self.entries[p]
            if (cur is None or cur == h) and pat.matches(H):
                pos.append(p)
        if len(pos) > 1:
            pos.sort()
        return pos

    def _table_ranks(self, H: int, h: int, hs: Iterable[int]) -> list:
        entries = self.entries
        matching = [entries[p][2] for p in self._matching(H, h)]
        out = []
        for hp in hs:
            r = self.default_rank
            for ranks in matching:
                v = ranks[hp]
                if v is not None:
                    r = v
                    break
            out.append(r)
        return out

    def rank_row(self, H: int, h: int) -> tuple:
        """Ranks of every hypothesis of the class at (H, h)."""
        k = self.kind
        if k == "const":
            return self._const_row
        if k == "global":
            return self.ranks
        if k in ("local", "hamming"):
            return self.matrix[h]
        m = self.cls.m
        if k == "union":
            return tuple(self.eval(hp, H, h) for hp in range(m))
        return tuple(self._table_ranks(H, h, range(m)))

    def argmin_mask(self, H: int, h: int) -> int:
        if not H:
            raise DomainError("argmin over an empty version space")
        k = self.kind
        if k == "const":
            return H
        if self._levels is not None:
            for lv in self._levels[0 if k == "global" else h]:
                if lv & H:
                    return lv & H
        key = (H, h if self.uses_current else -1)
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        hs = list(members(H))
        if k == "union":
            ranks = self._union_ranks(H, h, hs)
        else:
            ranks = self._table_ranks(H, h, hs)
        lo = min(ranks)
        out = 0
        for hp, r in zip(hs, ranks):
            if r == lo:
                out |= 1 << hp
        self._cache[key] = out
        return out

    def _union_ranks(self, H: int, h: int, hs: list[int]) -> list:
        a, b = self.parts
        mb = b.cls.m
        Ha, Hb = project(a.cls, b.cls, H)
        ha, hb = divmod(h, mb)
        ra = dict(zip(members(Ha), a.rank_values(Ha, ha)))
        rb = dict(zip(members(Hb), b.rank_values(Hb, hb)))
        return [ra[i] + rb[j] for i, j in (divmod(hp, mb) for hp in hs)]

    def rank_values(self, H: int, h: int) -> list:
        """Ranks of the members of H, in index order."""
        row = self.rank_row(H, h) if self.kind != "union" else None
        if row is not None:
            return [row[i] for i in members(H)]
        return self._union_ranks(H, h, list(members(H)))

    def argmin_set(self, H: int, h: int) -> frozenset[int]:
        self.cls.check_hypothesis(h)
        return frozenset(members(self.argmin_mask(H, h)))

    # serialization

    def to_json(self) -> dict:
        return {
            "family": self.family,
            "class_hash": self.cls.digest(),
            "default_rank": _rank_json(self.default_rank),
            "entries": self._entries_json(),
        }

    def _entries_json(self) -> dict:
        k = self.kind
        if k == "const":
            return {"kind": "const", "value": _rank_json(self.value)}
        if k == "global":
            return {"kind": "global", "ranks": [_rank_json(r) for r in self.ranks]}
        if k == "hamming":
            return {"kind": "local", "marker": "hamming"}
        if k == "local":
            return {"kind": "local", "matrix": [[_rank_json(r) for r in row] for row in self.matrix]}
        if k == "union":
            a, b = self.parts
            return {
                "kind": "disjoint-union-sum",
                "left": {"class": a.cls.to_hc(), "pref": a.to_json()},
                "right": {"class": b.cls.to_hc(), "pref": b.to_json()},
            }
        rows = []
        for cur, pat, ranks in self.entries:
            item = {"pattern": pat.to_json(), "ranks": [None if r is None else _rank_json(r) for r in ranks]}
            if k == "lvs":
                item["current"] = cur
            rows.append(item)
        return {"kind": k, "patterns": rows}

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=1, sort_keys=True) + "\n"

    def __repr__(self) -> str:
        return f"PreferenceFunction(family={self.family!r}, kind={self.kind!r}, m={self.cls.m})"


def _levels(ranks: Sequence) -> list[int]:
    by: dict = {}
    for i, r in enumerate(ranks):
        by[r] = by.get(r, 0) | (1 << i)
    return [by[r] for r in sorted(by)]


def _rank_vector(cls: HypothesisClass, ranks: Sequence, allow_none: bool = False) -> tuple:
    if len(ranks) != cls.m:
        raise InputError(f"rank array has length {len(ranks)}, expected {cls.m}")
    return tuple(None if (allow_none and r is None) else _rank(r) for r in ranks)


# builders


def build_const(cls: HypothesisClass, c=0) -> PreferenceFunction:
    return PreferenceFunction(cls, "const", "const", value=c)


def build_global(cls: HypothesisClass, ranks: Sequence) -> PreferenceFunction:
    return PreferenceFunction(cls, "global", "global", ranks=_rank_vector(cls, ranks))


def build_local_table(cls: HypothesisClass, matrix: Sequence[Sequence]) -> PreferenceFunction:
    if len(matrix) != cls.m:
        raise InputError(f"local matrix has {len(matrix)} rows, expected {cls.m}")
    rows = tuple(_rank_vector(cls, row) for row in matrix)
    return PreferenceFunction(cls, "local", "local", matrix=rows)


def build_local_hamming(cls: HypothesisClass) -> PreferenceFunction:
    rows = tuple(tuple(hamming(cls, h, hp) for hp in range(cls.m)) for h in range(cls.m))
    return PreferenceFunction(cls, "local", "hamming", matrix=rows)


def build_gvs(cls: HypothesisClass, patterns: Iterable[tuple[VersionSpacePattern, Sequence]],
              default=1) -> PreferenceFunction:
    """``patterns`` is an ordered list of (pattern, ranks); ``None`` ranks fall through."""
    entries = [(None, _check_pattern(cls, p), _rank_vector(cls, r, True)) for p, r in patterns]
    return PreferenceFunction(cls, "gvs", "gvs", entries=entries, default_rank=default)


def build_lvs(cls: HypothesisClass, patterns: Iterable[tuple[int | None, VersionSpacePattern, Sequence]],
              default=1) -> PreferenceFunction:
    """Entries are (current hypothesis or None for any, pattern, ranks)."""
    entries = []
    for cur, p, r in patterns:
        if cur is not None:
            cls.check_hypothesis(cur)
        entries.append((cur, _check_pattern(cls, p), _rank_vector(cls, r, True)))
    return PreferenceFunction(cls, "lvs", "lvs", entries=entries, default_rank=default)


def build_union_sum(a: PreferenceFunction, b: PreferenceFunction,
                    cls: HypothesisClass | None = None) -> PreferenceFunction:
    union = cls if cls is not None else disjoint_union(a.cls, b.cls)
    if union.m != a.cls.m * b.cls.m or union.n != a.cls.n + b.cls.n:
        raise BindingError("union class does not match the factor classes")
    return PreferenceFunction(union, "lvs", "union", parts=(a, b))


def _check_pattern(cls: HypothesisClass, p: VersionSpacePattern) -> VersionSpacePattern:
    if (p.required | p.optional) > cls.full:
        raise InputError("pattern mentions a hypothesis outside the class")
    return p


def argmin_set(sigma: PreferenceFunction, H: int, h: int) -> frozenset[int]:
    return sigma.argmin_set(H, h)


def eval_sigma(sigma: PreferenceFunction, hp: int, H: int, h: int):
    return sigma.eval(hp, H, h)


# family membership


def check_family(sigma: PreferenceFunction, family: str, cls: HypothesisClass | None = None, *,
                 budget: int = DEFAULT_ENUM_BUDGET) -> FamilyVerdict:
    if family not in CHECKABLE:
        raise InputError(f"unknown family {family!r}")
    if cls is not None:
        sigma.bind_check(cls)
    cls = sigma.cls
    spaces = realizable_version_spaces(cls, budget)
    if len(spaces) * cls.m > budget:
        raise ResourceError(f"check domain exceeds budget {budget}", reason="enumeration-budget")
    scope = f"H over {len(spaces)} realizable version spaces, h over all {cls.m} hypotheses"
    m = cls.m

    def differ(row_a, at_a, row_b, at_b):
        hp = next(i for i in range(m) if row_a[i] != row_b[i])
        return {
            "kind": "differ",
            "h_prime": hp,
            "first": {"H": list(members(at_a[0])), "h": at_a[1], "value": _rank_json(row_a[hp])},
            "second": {"H": list(members(at_b[0])), "h": at_b[1], "value": _rank_json(row_b[hp])},
        }

    if family == "lvs":
        return FamilyVerdict(family, True, None, "every function of (h', H, h) is in lvs")
    if family == "wsls":
        for H in spaces:
            for h in members(H):
                got = sigma.argmin_mask(H, h)
                if got != 1 << h:
                    cex = {"kind": "wsls", "H": list(members(H)), "h": h, "argmin": list(members(got))}
                    return FamilyVerdict(family, False, cex, scope)
        return FamilyVerdict(family, True, None, scope)
    if family in ("const", "global"):
        base = sigma.rank_row(cls.full, 0)
        for H in spaces:
            for h in range(m):
                row = sigma.rank_row(H, h)
                if row != base:
                    return FamilyVerdict(family, False, differ(base, (cls.full, 0), row, (H, h)), scope)
        if family == "const":
            for hp in range(1, m):
                if base[hp] != base[0]:
                    cex = {
                        "kind": "differ-candidate",
                        "H": list(members(cls.full)),
                        "h": 0,
                        "first": {"h_prime": 0, "value": _rank_json(base[0])},
                        "second": {"h_prime": hp, "value": _rank_json(base[hp])},
                    }
                    return FamilyVerdict(family, False, cex, scope)
        return FamilyVerdict(family, True, None, scope)
    if family == "gvs":
        for H in spaces:
            base = sigma.rank_row(H, 0)
            for h in range(1, m):
                row = sigma.rank_row(H, h)
                if row != base:
                    return FamilyVerdict(family, False, differ(base, (H, 0), row, (H, h)), scope)
        return FamilyVerdict(family, True, None, scope)
    # local
    for h in range(m):
        base = sigma.rank_row(cls.full, h)
        for H in spaces:
            row = sigma.rank_row(H, h)
            if row != base:
                return FamilyVerdict(family, False, differ(base, (cls.full, h), row, (H, h)), scope)
    return FamilyVerdict(family, True, None, scope)


def recheck(sigma: PreferenceFunction, verdict: FamilyVerdict) -> bool:
    """Independently confirm that a failing verdict's counterexample is real."""
    c = verdict.counterexample
    if verdict.holds or c is None:
        return False
    kind = c["kind"]
    if kind == "differ":
        hp = c["h_prime"]
        a = sigma.eval(hp, mask_of(c["first"]["H"]), c["first"]["h"])
        b = sigma.eval(hp, mask_of(c["second"]["H"]), c["second"]["h"])
        if a == b:
            return False
        fa, sa = (mask_of(c["first"]["H"]), c["first"]["h"]), (mask_of(c["second"]["H"]), c["second"]["h"])
        if verdict.family == "gvs":
            return fa[0] == sa[0]
        if verdict.family == "local":
            return fa[1] == sa[1]
        return True
    if kind == "differ-candidate":
        H, h = mask_of(c["H"]), c["h"]
        return sigma.eval(c["first"]["h_prime"], H, h) != sigma.eval(c["second"]["h_prime"], H, h)
    if kind == "wsls":
        H, h = mask_of(c["H"]), c["h"]
        return (H >> h) & 1 == 1 and sigma.argmin_mask(H, h) != 1 << h
    if kind == "collusion":
        cls = sigma.cls
        H = mask_of(c["state"]["H"])
        hp, hat = c["state"]["h_prev"], c["h_hat"]
        if sigma.argmin_mask(H, hp) != 1 << hat:
            return False
        S = [LabeledExample(x, y) for x, y in c["S"]]
        if any(cls.label(hat, x) != y for x, y in S):
            return False
        H2 = H
        for z in S:
            H2 &= cls.example_mask(z)
        return sigma.argmin_mask(H2, hat) != 1 << hat
    return False


# collusion-freeness


def is_collusion_free(sigma: PreferenceFunction, cls: HypothesisClass | None, h0: int, *,
                      budget: int = DEFAULT_ENUM_BUDGET) -> FamilyVerdict:
    """Explore every reachable state (H_t, h_{t-1}) with t >= 1.  Wherever the
    learner's reply is a single hypothesis ``hat``, every further version space
    H_t & H(S) with S consistent with ``hat`` must keep ``hat`` as the unique
    argmin.  Example order inside S does not matter, so sets suffice."""
    if cls is not None:
        sigma.bind_check(cls)
    cls = sigma.cls
    cls.check_hypothesis(h0)
    n = cls.n
    agree = [(cls.agree_mask(x, 0), cls.agree_mask(x, 1)) for x in range(n)]
    labels = cls.rows
    stays: dict[tuple[int, int], tuple[LabeledExample, ...] | None] = {}

    def failure(H: int, hat: int):
        """None if hat survives every consistent extension of H, else the S that breaks it."""
        key = (H, hat)
        if key in stays:
            return stays[key]
        out = None
        if sigma.argmin_mask(H, hat) != 1 << hat:
            out = ()
        else:
            row = labels[hat]
            for x in range(n):
                H2 = H & agree[x][row[x]]
                if H2 != H:
                    sub = failure(H2, hat)
                    if sub is not None:
                        out = (LabeledExample(x, row[x]),) + sub
                        break
        stays[key] = out
        return out

    seen: set[tuple[int, int]] = set()
    frontier = []
    for x in range(n):
        for y in (0, 1):
            H1 = cls.full & agree[x][y]
            if H1 and (H1, h0) not in seen:
                seen.add((H1, h0))
                frontier.append((H1, h0))
    states = 0
    while frontier:
        nxt = []
        for H, hp in frontier:
            states += 1
            if states > budget:
                raise ResourceError(f"more than {budget} reachable states", reason="enumeration-budget")
            C = sigma.argmin_mask(H, hp)
            if C & (C - 1) == 0:
                hat = C.bit_length() - 1
                S = failure(H, hat)
                if S is not None:
                    if not S:
                        # name a consistent example that leaves H unchanged
                        row = labels[hat]
                        S = tuple(LabeledExample(x, row[x]) for x in range(n) if H & agree[x][row[x]] == H)[:1]
                    H2 = H
                    for z in S:
                        H2 &= agree[z.instance][z.label]
                    cex = {
                        "kind": "collusion",
                        "state": {"H": list(members(H)), "h_prev": hp},
                        "h_hat": hat,
                        "S": [list(z) for z in S],
                        "argmin": list(members(sigma.argmin_mask(H2, hat))),
                    }
                    return FamilyVerdict("collusion-free", False, cex, f"{states} states explored")
            for c in members(C):
                for x in range(n):
                    for y in (0, 1):
                        H2 = H & agree[x][y]
                        if H2 and (H2, c) not in seen:
                            seen.add((H2, c))
                            nxt.append((H2, c))
        frontier = nxt
    return FamilyVerdict("collusion-free", True, None, f"{states} reachable states, sets of consistent examples")


# .pref files


def dumps_pref(sigma: PreferenceFunction) -> str:
    return sigma.dumps()


def loads_pref(text: str, cls: HypothesisClass) -> PreferenceFunction:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as e:
        raise InputError(f"preference file is not JSON: {e}") from None
    return pref_from_json(obj, cls)


def pref_from_json(obj: Any, cls: HypothesisClass) -> PreferenceFunction:
    if not isinstance(obj, dict):
        raise InputError("preference file must hold a JSON object")
    for key in ("family", "class_hash", "default_rank", "entries"):
        if key not in obj:
            raise InputError(f"preference file lacks {key!r}")
    if obj["class_hash"] != cls.digest():
        raise BindingError("preference file was written for a different class (hash mismatch)",
                           reason="hash-mismatch")
    family = obj["family"]
    default = _rank(obj["default_rank"])
    e = obj["entries"]
    if not isinstance(e, dict) or "kind" not in e:
        raise InputError("entries must be an object with a 'kind'")
    kind = e["kind"]
    m = cls.m
    try:
        if kind == "const":
            sigma = build_const(cls, e["value"])
        elif kind == "global":
            sigma = build_global(cls, e["ranks"])
        elif kind == "local" and e.get("marker") == "hamming":
            sigma = build_local_hamming(cls)
        elif kind == "local":
            sigma = build_local_table(cls, e["matrix"])
        elif kind == "gvs":
            sigma = build_gvs(cls, [(VersionSpacePattern.from_json(p["pattern"], m), p["ranks"])
                                    for p in e["patterns"]], default)
        elif kind == "lvs":
            sigma = build_lvs(cls, [(p.get("current"), VersionSpacePattern.from_json(p["pattern"], m), p["ranks"])
                                    for p in e["patterns"]], default)
        elif kind == "disjoint-union-sum":
            parts = []
            for side in ("left", "right"):
                sub_cls = parse_hc(e[side]["class"])
                parts.append(pref_from_json(e[side]["pref"], sub_cls))
            union = disjoint_union(parts[0].cls, parts[1].cls)
            if union.rows != cls.rows:
                raise BindingError("factor classes do not compose to the bound class")
            sigma = build_union_sum(parts[0], parts[1], cls)
        else:
            raise InputError(f"unknown entries kind {kind!r}")
    except (KeyError, TypeError) as err:
        raise InputError(f"malformed {kind} entries: {err}") from None
    if sigma.family != family:
        raise InputError(f"family {family!r} does not match entries of kind {kind!r}")
    return sigma


def load_pref(path: str, cls: HypothesisClass) -> PreferenceFunction:
    with open(path, encoding="utf-8") as fh:
        return loads_pref(fh.read(), cls)


def dump_pref(sigma: PreferenceFunction, path: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(sigma.dumps())
