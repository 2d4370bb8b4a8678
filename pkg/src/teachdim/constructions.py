"""Explicit preference constructions over powerset classes.

* ``tree_to_local_sigma`` turns an ordered tree of hypotheses into a local,
  win-stay lose-shift preference: from node h the learner prefers h, then h's
  children in order, then everything else.
* ``powerset7_tree`` is a depth-3 tree covering all 128 hypotheses over seven
  instances.  Its left branch is fixed; ``complete_tree`` fills the rest.
* ``double_sigma`` lifts a preference on powerset(k) to powerset(2k).
* ``wsls_disjoint_union_sigma`` adds the ranks of two factor preferences.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from ._bits import lowest, mask_of, members, popcount
from .engines import (
    DimensionResult,
    is_nonclashing,
    nctd,
    rtd,
    td_at_most,
    td_of_sigma,
    weak_orders,
)
from .errors import DomainError, InputError, PreconditionError, ResourceError
from .hypotheses import HypothesisClass, LabeledExample, disjoint_union, powerset_class
from .preference import (
    PreferenceFunction,
    build_global,
    build_local_table,
    build_union_sum,
    check_family,
)


@dataclass(frozen=True)
class PreferenceTree:
    root: int
    children: Mapping[int, tuple[int, ...]]
    edges: Mapping[int, LabeledExample] = field(default_factory=dict)
    names: Mapping[int, str] = field(default_factory=dict)

    def nodes(self) -> list[int]:
        out, stack = [], [self.root]
        while stack:
            v = stack.pop()
            out.append(v)
            stack.extend(reversed(self.children.get(v, ())))
        return out

    def parents(self) -> dict[int, int]:
        return {c: p for p, cs in self.children.items() for c in cs}

    def path(self, node: int) -> list[int]:
        par = self.parents()
        out = [node]
        while out[-1] != self.root:
            if out[-1] not in par:
                raise InputError(f"node {node} is not in the tree")
            out.append(par[out[-1]])
        return out[::-1]

    def depth(self) -> int:
        best, stack = 0, [(self.root, 0)]
        while stack:
            v, d = stack.pop()
            best = max(best, d)
            stack.extend((c, d + 1) for c in self.children.get(v, ()))
        return best

    def name(self, node: int) -> str:
        return self.names.get(node, str(node))

    def index_of(self, name: str) -> int:
        for k, v in self.names.items():
            if v == name:
                return k
        raise InputError(f"no tree node named {name!r}")


def validate_tree(cls: HypothesisClass, tree: PreferenceTree, max_depth: int | None = None) -> None:
    nodes = tree.nodes()
    if len(nodes) != len(set(nodes)):
        raise InputError("tree repeats a hypothesis")
    for v in nodes:
        cls.check_hypothesis(v)
    stray = set(tree.children) - set(nodes)
    if stray:
        raise InputError(f"children listed for nodes outside the tree: {sorted(stray)}")
    if len(nodes) != cls.m:
        missing = sorted(set(range(cls.m)) - set(nodes))
        raise InputError(f"tree does not cover the class; missing {missing[:8]}", reason="coverage")
    if max_depth is not None and tree.depth() > max_depth:
        raise InputError(f"tree depth {tree.depth()} exceeds {max_depth}")


def _edge_example(cls: HypothesisClass, tree: PreferenceTree, parent: int, child: int,
                  path_mask: int, fixed: set[int]) -> LabeledExample:
    """First instance whose child label removes the parent and every earlier sibling."""
    if not (path_mask >> child) & 1:
        raise DomainError(f"{child} contradicts the examples on the path to its parent {parent}")
    sibs = tree.children[parent]
    earlier = sibs[: sibs.index(child)]
    for x in range(cls.n):
        if x in fixed or cls.label(child, x) == cls.label(parent, x):
            continue
        H = path_mask & cls.agree_mask(x, cls.label(child, x))
        if not any((H >> s) & 1 for s in earlier):
            return LabeledExample(x, cls.label(child, x))
    raise DomainError(f"no example moves {parent} to its child {child}")


def teaching_sequence(cls: HypothesisClass, tree: PreferenceTree, node: int) -> tuple[LabeledExample, ...]:
    path = tree.path(node)
    seq: list[LabeledExample] = []
    H = cls.full
    for p, c in zip(path, path[1:]):
        z = tree.edges.get(c) or _edge_example(cls, tree, p, c, H, {x for x, _ in seq})
        seq.append(z)
        H &= cls.example_mask(z)
    return tuple(seq)


def tree_to_local_sigma(cls: HypothesisClass, tree: PreferenceTree) -> PreferenceFunction:
    validate_tree(cls, tree)
    m = cls.m
    rows = []
    for h in range(m):
        row = [m - 1] * m
        row[h] = 0
        for r, c in enumerate(tree.children.get(h, ()), start=1):
            row[c] = r
        rows.append(row)
    return build_local_table(cls, rows)


def star_tree(cls: HypothesisClass, root: int = 0) -> PreferenceTree:
    kids = tuple(h for h in range(cls.m) if h != root)
    return PreferenceTree(root, {root: kids})


def star_sigma(k: int = 1) -> PreferenceFunction:
    cls = powerset_class(k)
    return tree_to_local_sigma(cls, star_tree(cls))


# tree completion


def complete_tree(cls: HypothesisClass, root: int, depth: int,
                  fixed: Mapping[int, Sequence[tuple[int, LabeledExample]]] | None = None,
                  frozen: set[int] | frozenset[int] = frozenset(),
                  names: Mapping[int, str] | None = None) -> PreferenceTree:
    """Extend a partial ordered tree until it covers the class at the given depth.

    Each open node offers one slot per instance not used on its path.  A child
    in slot x is taught by (x, child(x)); it must disagree with the node on x and
    agree with it on every later slot, so earlier siblings never answer later
    examples.  Inner slots are filled greedily with the closest free
    hypotheses, the last level by bipartite matching."""
    fixed = {p: list(cs) for p, cs in (fixed or {}).items()}
    children: dict[int, list[int]] = {}
    edges: dict[int, LabeledExample] = {}
    placed = {root}
    for p, cs in fixed.items():
        for c, z in cs:
            if c in placed:
                raise InputError(f"hypothesis {c} placed twice")
            placed.add(c)
            edges[c] = LabeledExample(*z)
    n = cls.n

    def path_info(v: int, par: dict[int, int]) -> tuple[int, set[int]]:
        H, used = cls.full, set()
        while v != root:
            z = edges[v]
            H &= cls.example_mask(z)
            used.add(z.instance)
            v = par[v]
        return H, used

    def slot_ok(v: int, H: int, slots: list[int], j: int, c: int) -> bool:
        if not (H >> c) & 1:
            return False
        t = slots[j]
        if cls.label(c, t) == cls.label(v, t):
            return False
        return all(cls.label(c, s) == cls.label(v, s) for s in slots[j + 1:])

    par: dict[int, int] = {}
    level = [root]
    pending: list[tuple[int, int, list[int]]] = []  # (node, H, slots) on the last inner level
    for d in range(depth):
        nxt = []
        for v in level:
            if v in frozen:
                kids = [c for c, _ in fixed.get(v, ())]
                children[v] = kids
                par.update((c, v) for c in kids)
                nxt.extend(kids)
                continue
            H, used = path_info(v, par)
            taken = {edges[c].instance: c for c, _ in fixed.get(v, ())}
            slots = [x for x in range(n) if x not in used]
            if d < depth - 1:
                kids = []
                for j, t in enumerate(slots):
                    if t in taken:
                        kids.append(taken[t])
                        continue
                    best = None
                    for c in range(cls.m):
                        if c not in placed and slot_ok(v, H, slots, j, c):
                            key = (popcount(cls.code(c) ^ cls.code(v)), c)
                            if best is None or key < best:
                                best = key
                    if best is not None:
                        c = best[1]
                        placed.add(c)
                        edges[c] = LabeledExample(t, cls.label(c, t))
                        kids.append(c)
                children[v] = kids
                par.update((c, v) for c in kids)
                nxt.extend(kids)
            else:
                pending.append((v, H, slots))
        level = nxt
    # last level: match remaining hypotheses to free slots
    slot_list = []
    for v, H, slots in pending:
        for j in range(len(slots)):
            slot_list.append((v, H, slots, j))
    free = [c for c in range(cls.m) if c not in placed]
    options = {c: [i for i, (v, H, slots, j) in enumerate(slot_list) if slot_ok(v, H, slots, j, c)] for c in free}
    holder: dict[int, int] = {}

    def augment(c: int, seen: set[int]) -> bool:
        for i in options[c]:
            if i in seen:
                continue
            seen.add(i)
            if i not in holder or augment(holder[i], seen):
                holder[i] = c
                return True
        return False

    if all(augment(c, set()) for c in sorted(free, key=lambda c: (len(options[c]), c))):
        by_node: dict[int, list[tuple[int, int]]] = {}
        for i, c in holder.items():
            v, H, slots, j = slot_list[i]
            by_node.setdefault(v, []).append((j, c))
            edges[c] = LabeledExample(slots[j], cls.label(c, slots[j]))
        for v, H, slots in pending:
            children[v] = [c for _, c in sorted(by_node.get(v, []))]
    else:
        # fixed slot order is too strict here; search child orders per node
        plan = _cover_last_level(cls, pending, mask_of(free))
        if plan is None:
            raise DomainError(f"cannot cover the class within depth {depth}", reason="completion-failed")
        for v, H, slots in pending:
            children[v] = [c for _, c in plan.get(v, ())]
            for t, c in plan.get(v, ()):
                edges[c] = LabeledExample(t, cls.label(c, t))
    tree = PreferenceTree(root, {v: tuple(cs) for v, cs in children.items() if cs}, edges, dict(names or {}))
    validate_tree(cls, tree, depth)
    return tree


def _child_orders(cls: HypothesisClass, v: int, H: int, slots: list[int], free: int):
    """Distinct child sets of v reachable by some valid ordering, one order each."""
    found: dict[int, tuple[tuple[int, int], ...]] = {}

    def rec(seq: tuple[tuple[int, int], ...], got: int):
        found.setdefault(got, seq)
        for t in slots:
            if any(t == s for s, _ in seq):
                continue
            # earlier siblings must keep the node's label on t
            if any(cls.label(e, t) != cls.label(v, t) for _, e in seq):
                continue
            for d in members(H & free & ~got & cls.agree_mask(t, 1 - cls.label(v, t))):
                rec(seq + ((t, d),), got | (1 << d))

    rec((), 0)
    return found


def _cover_last_level(cls: HypothesisClass, pending, free: int):
    options = [(v, _child_orders(cls, v, H, slots, free)) for v, H, slots in pending]
    options.sort(key=lambda o: len(o[1]))
    plan: dict[int, tuple[tuple[int, int], ...]] = {}

    def rec(i: int, got: int) -> bool:
        if i == len(options):
            return got == free
        v, opts = options[i]
        for mask in sorted(opts, key=lambda s: -popcount(s)):
            if mask & got:
                continue
            plan[v] = opts[mask]
            if rec(i + 1, got | mask):
                return True
        plan.pop(v, None)
        return False

    return plan if rec(0, 0) else None


# the seven-instance tree

_P7_LEFT = {
    # parent: [(child, bits, instance, label)], in preference order
    "h1": [("h8", "1100000", 1, 1), ("h9", "1110000", 2, 1), ("h10", "1111000", 3, 1),
           ("h11", "1111100", 4, 1), ("h12", "1111110", 5, 1), ("h13", "1111111", 6, 1)],
    "h8": [("h44", "1101000", 3, 1), ("h45", "1101100", 4, 1), ("h46", "1110100", 2, 1),
           ("h47", "1100010", 5, 1), ("h48", "1100101", 6, 1)],
    "h9": [("h79", "1010000", 1, 0), ("h80", "1010100", 4, 1), ("h81", "1010110", 5, 1),
           ("h82", "1111010", 3, 1), ("h83", "1011101", 6, 1)],
    "h10": [("h114", "1001000", 1, 0), ("h115", "1001100", 4, 1)],
}
_P7_LEAVES = ("h11", "h12", "h13")


def powerset7_tree() -> PreferenceTree:
    cls = powerset_class(7)
    names = {0: "h0", int("1000000", 2): "h1"}
    index = {"h0": 0, "h1": int("1000000", 2)}
    fixed: dict[int, list[tuple[int, LabeledExample]]] = {0: [(index["h1"], LabeledExample(0, 1))]}
    for pname, kids in _P7_LEFT.items():
        fixed[index[pname]] = []
        for cname, bits, x, y in kids:
            c = int(bits, 2)
            names[c], index[cname] = cname, c
            fixed[index[pname]].append((c, LabeledExample(x, y)))
    frozen = {index[p] for p in _P7_LEFT} | {index[p] for p in _P7_LEAVES}
    tree = complete_tree(cls, 0, 3, fixed, frozen, names)
    # the other children of the root take the next names
    for i, c in enumerate(tree.children[0][1:], start=2):
        names[c] = f"h{i}"
    return PreferenceTree(tree.root, tree.children, tree.edges, names)


def powerset7_sigma() -> tuple[HypothesisClass, PreferenceTree, PreferenceFunction]:
    cls = powerset_class(7)
    tree = powerset7_tree()
    return cls, tree, tree_to_local_sigma(cls, tree)


def wsls_tree(k: int, root: int = 0) -> PreferenceTree:
    """A depth-2 win-stay lose-shift tree on powerset(k), for k <= 4."""
    cls = powerset_class(k)
    return complete_tree(cls, root, 2)


# doubling


def _powerset_order(cls: HypothesisClass) -> int:
    k = cls.n
    if cls.rows != powerset_class(k).rows:
        raise PreconditionError("preference is not bound to a powerset class in binary order", reason="not-powerset")
    return k


def check_normalized(sigma: PreferenceFunction) -> None:
    """Diagonal 0, off-diagonal ranks in (0, m-1], and local and wsls."""
    m = sigma.cls.m
    for fam in ("local", "wsls"):
        v = check_family(sigma, fam)
        if not v.holds:
            raise PreconditionError(f"preference is not {fam}", reason=f"not-{fam}", counterexample=v.counterexample)
    for h in range(m):
        row = sigma.rank_row(sigma.cls.full, h)
        if row[h] != 0:
            raise PreconditionError(f"rank of {h} from itself is {row[h]}, not 0", reason="normalization", entry=(h, h))
        for hp in range(m):
            if hp != h and not 0 < row[hp] <= m - 1:
                raise PreconditionError(
                    f"rank of {hp} from {h} is {row[hp]}, outside (0, {m - 1}]", reason="normalization", entry=(h, hp)
                )


DOUBLE_MAX_INSTANCES = 8


def double_sigma(sigma_k: PreferenceFunction) -> PreferenceFunction:
    k = _powerset_order(sigma_k.cls)
    if 2 * k > DOUBLE_MAX_INSTANCES:
        raise ResourceError(
            f"doubling powerset({k}) needs a {1 << 2 * k} x {1 << 2 * k} table; the limit is "
            f"powerset({DOUBLE_MAX_INSTANCES})",
            reason="class-too-large",
        )
    check_normalized(sigma_k)
    big = powerset_class(2 * k)
    mk, m = 1 << k, 1 << (2 * k)
    low = mk - 1
    full_k = sigma_k.cls.full
    base = [sigma_k.rank_row(full_k, a) for a in range(mk)]
    rows = [[m - 1] * m for _ in range(m)]
    for h in range(m):
        rows[h][h] = 0
    pivots = [a << k for a in range(mk)]
    for p in pivots:
        for q in pivots:
            rows[p][q] = base[p >> k][q >> k]
    for p in pivots:
        group = [p | b for b in range(mk)]
        for h in group:
            for hp in group:
                if h != hp:
                    rows[h][hp] = base[h & low][hp & low] + mk
    out = build_local_table(big, rows)
    check_normalized(out)
    return out


def pivots(k: int) -> list[int]:
    return [a << k for a in range(1 << k)]


# disjoint unions


def wsls_disjoint_union_sigma(sigma_a: PreferenceFunction, sigma_b: PreferenceFunction) -> PreferenceFunction:
    for side, s in (("left", sigma_a), ("right", sigma_b)):
        v = check_family(s, "wsls")
        if not v.holds:
            raise PreconditionError(f"{side} preference is not win-stay lose-shift", reason="not-wsls",
                                    counterexample=v.counterexample)
    return build_union_sum(sigma_a, sigma_b, disjoint_union(sigma_a.cls, sigma_b.cls))


def wsls_td1_possible(k: int, h0: int | None = None) -> dict | None:
    """Search every way a win-stay lose-shift learner on powerset(k) could answer
    single examples from h0 and report one that reaches every target, if any.

    An example consistent with h0 keeps the learner on h0, so the other targets
    must each be the unique answer to one of the k examples that contradict h0.
    Each such example gets one answer; we enumerate all assignments."""
    cls = powerset_class(k)
    starts = range(cls.m) if h0 is None else [h0]
    for s in starts:
        options = []
        for x in range(k):
            y = 1 - cls.label(s, x)
            options.append(list(members(cls.agree_mask(x, y))))
        need = cls.full & ~(1 << s)
        for pick in itertools.product(*options):
            if mask_of(pick) == need:
                return {"h0": s, "answers": list(pick)}
    return None


def certify_union(sigma_a: PreferenceFunction, h0a: int, sigma_b: PreferenceFunction, h0b: int) -> dict:
    union = wsls_disjoint_union_sigma(sigma_a, sigma_b)
    ta = td_of_sigma(sigma_a.cls, sigma_a, h0a).value
    tb = td_of_sigma(sigma_b.cls, sigma_b, h0b).value
    h0 = h0a * sigma_b.cls.m + h0b
    tu = td_of_sigma(union.cls, union, h0).value
    return {"td_left": ta, "td_right": tb, "td_union": tu, "h0": h0, "subadditive": tu <= ta + tb, "sigma": union}


# global orders


def order_to_global_sigma(cls: HypothesisClass, weak_order: Sequence) -> PreferenceFunction:
    if len(weak_order) != cls.m:
        raise InputError(f"order has {len(weak_order)} ranks, expected {cls.m}")
    return build_global(cls, weak_order)


# local versus gvs


def local_td1_row(cls: HypothesisClass) -> tuple | None:
    """A rank row for h0 that lets a local learner reach every target with one
    example, or None.  Only h0's row matters for single examples and the row is
    unconstrained, so the answer does not depend on which hypothesis h0 is."""
    if cls.m == 1:
        return (0,)
    masks = sorted({cls.agree_mask(x, y) for x in range(cls.n) for y in (0, 1)} - {0})
    for ranks in weak_orders(cls.m):
        by: dict[int, int] = {}
        for i, r in enumerate(ranks):
            by[r] = by.get(r, 0) | (1 << i)
        lv = [by[r] for r in sorted(by)]
        covered = 0
        for M in masks:
            for L in lv:
                if L & M:
                    C = L & M
                    if C & (C - 1) == 0:
                        covered |= C
                    break
        if covered == cls.full:
            return ranks
    return None


def local_td1_sigma(cls: HypothesisClass, h0: int) -> PreferenceFunction | None:
    """Engine-checked version of local_td1_row for a fixed h0."""
    for ranks in weak_orders(cls.m):
        rows = [[0] * cls.m for _ in range(cls.m)]
        rows[h0] = list(ranks)
        sigma = build_local_table(cls, rows)
        if td_at_most(cls, sigma, h0, 1):
            return sigma
    return None


@dataclass(frozen=True)
class GapWitness:
    cls: HypothesisClass
    nctd: DimensionResult
    rtd: DimensionResult
    local_td1_refuted: tuple[int, ...]


def find_gvs_beats_local_class(n_max: int = 3, m_max: int = 6, *, engine_check: bool = True) -> GapWitness | None:
    """First class (by size, then lexicographically) with NCTD 1 and RTD 2."""
    for n in range(1, n_max + 1):
        for m in range(2, min(m_max, 1 << n) + 1):
            for codes in itertools.combinations(range(1 << n), m):
                rows = tuple(tuple((c >> (n - 1 - x)) & 1 for x in range(n)) for c in codes)
                cls = HypothesisClass(rows)
                nc = nctd(cls, 1)
                if nc.value != 1 or nc.bound_kind != "exact":
                    continue
                r = rtd(cls)
                if r.value != 2:
                    continue
                if local_td1_row(cls) is not None:  # pragma: no cover - ruled out by theory
                    continue
                refuted = tuple(h for h in range(cls.m) if not engine_check or local_td1_sigma(cls, h) is None)
                return GapWitness(cls, nc, r, refuted)
    return None
