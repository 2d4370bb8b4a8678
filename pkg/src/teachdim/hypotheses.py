"""Finite hypothesis classes, labeled examples and version spaces.

A class stores its hypotheses as rows of a bit matrix.  Version spaces are
plain ``int`` bitmasks over hypothesis indices, so intersecting them is a
single ``&``.  For every instance ``x`` and label ``y`` the class precomputes
``agree_mask(x, y)``, the set of hypotheses labelling ``x`` with ``y``.
"""
from __future__ import annotations

import hashlib
import itertools
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Sequence

from ._bits import members, popcount
from .errors import InputError, ResourceError

MAX_HYPOTHESES = 1 << 20
POWERSET_CAP = 16


class LabeledExample(NamedTuple):
    instance: int
    label: int

    def __str__(self) -> str:
        return f"(x{self.instance},{self.label})"


@dataclass(frozen=True)
class HypothesisClass:
    rows: tuple[tuple[int, ...], ...]
    instance_names: tuple[str, ...] | None = None
    hypothesis_names: tuple[str, ...] | None = None
    max_hypotheses: int = field(default=MAX_HYPOTHESES, compare=False, repr=False)
    _agree: tuple[tuple[int, int], ...] = field(init=False, repr=False, compare=False)
    _codes: tuple[int, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        rows = tuple(tuple(int(b) for b in r) for r in self.rows)
        object.__setattr__(self, "rows", rows)
        if not rows:
            raise InputError("a hypothesis class needs at least one hypothesis")
        if len(rows) > self.max_hypotheses:
            raise ResourceError(
                f"class has {len(rows)} hypotheses, cap is {self.max_hypotheses}",
                reason="class-too-large",
            )
        n = len(rows[0])
        if n < 1:
            raise InputError("a hypothesis class needs at least one instance")
        seen: dict[tuple[int, ...], int] = {}
        for i, r in enumerate(rows):
            if len(r) != n:
                raise InputError(f"hypothesis {i} has {len(r)} labels, expected {n}")
            if any(b not in (0, 1) for b in r):
                raise InputError(f"hypothesis {i} has a non-binary label")
            if r in seen:
                raise InputError(f"hypotheses {seen[r]} and {i} are identical", reason="duplicate")
            seen[r] = i
        for attr, size in (("instance_names", n), ("hypothesis_names", len(rows))):
            names = getattr(self, attr)
            if names is not None:
                names = tuple(str(s) for s in names)
                if len(names) != size or len(set(names)) != size:
                    raise InputError(f"{attr} must hold {size} distinct names")
                object.__setattr__(self, attr, names)
        agree = []
        for x in range(n):
            ones = 0
            for i, r in enumerate(rows):
                if r[x]:
                    ones |= 1 << i
            full = (1 << len(rows)) - 1
            agree.append((full ^ ones, ones))
        object.__setattr__(self, "_agree", tuple(agree))
        # row as an integer, bit x set iff h(x) = 1
        codes = tuple(sum(b << x for x, b in enumerate(r)) for r in rows)
        object.__setattr__(self, "_codes", codes)

    # sizes and names

    @property
    def n(self) -> int:
        return len(self.rows[0])

    @property
    def m(self) -> int:
        return len(self.rows)

    @property
    def full(self) -> int:
        return (1 << len(self.rows)) - 1

    def instance_name(self, x: int) -> str:
        return self.instance_names[x] if self.instance_names else f"x{x}"

    def hypothesis_name(self, h: int) -> str:
        return self.hypothesis_names[h] if self.hypothesis_names else f"h{h}"

    def instance_index(self, name: str | int) -> int:
        if isinstance(name, int):
            self.check_instance(name)
            return name
        if self.instance_names and name in self.instance_names:
            return self.instance_names.index(name)
        if name.startswith("x") and name[1:].isdigit() and not self.instance_names:
            return self.check_instance(int(name[1:]))
        if name.isdigit():
            return self.check_instance(int(name))
        raise InputError(f"unknown instance {name!r}")

    def hypothesis_index(self, name: str | int) -> int:
        if isinstance(name, int):
            self.check_hypothesis(name)
            return name
        if self.hypothesis_names and name in self.hypothesis_names:
            return self.hypothesis_names.index(name)
        if name.startswith("h") and name[1:].isdigit() and not self.hypothesis_names:
            return self.check_hypothesis(int(name[1:]))
        if name.isdigit():
            return self.check_hypothesis(int(name))
        raise InputError(f"unknown hypothesis {name!r}")

    def check_instance(self, x: int) -> int:
        if not 0 <= x < self.n:
            raise InputError(f"instance index {x} out of range [0, {self.n})")
        return x

    def check_hypothesis(self, h: int) -> int:
        if not 0 <= h < self.m:
            raise InputError(f"hypothesis index {h} out of range [0, {self.m})")
        return h

    # labels and masks

    def label(self, h: int, x: int) -> int:
        return self.rows[h][x]

    def agree_mask(self, x: int, y: int) -> int:
        """Hypotheses that label instance ``x`` with ``y``."""
        return self._agree[x][y]

    def example_mask(self, z: LabeledExample) -> int:
        x, y = z
        self.check_instance(x)
        if y not in (0, 1):
            raise InputError(f"label {y!r} is not a bit")
        return self._agree[x][y]

    def code(self, h: int) -> int:
        return self._codes[h]

    def names_of(self, mask: int) -> list[str]:
        return [self.hypothesis_name(i) for i in members(mask)]

    def bitstring(self, h: int) -> str:
        return "".join(map(str, self.rows[h]))

    def examples_of(self, h: int, instances: Iterable[int] | None = None) -> tuple[LabeledExample, ...]:
        xs = range(self.n) if instances is None else instances
        return tuple(LabeledExample(x, self.rows[h][x]) for x in xs)

    # serialization

    def to_hc(self) -> str:
        lines = [f"instances {self.n}"]
        if self.instance_names:
            lines.append("instance-names " + " ".join(self.instance_names))
        for h, r in enumerate(self.rows):
            lines.append(f"{self.hypothesis_name(h)}: " + " ".join(map(str, r)))
        return "\n".join(lines) + "\n"

    def digest(self) -> str:
        return hashlib.sha256(self.to_hc().encode("utf-8")).hexdigest()


def parse_hc(text: str, *, max_hypotheses: int = MAX_HYPOTHESES) -> HypothesisClass:
    """Parse the line-oriented ``.hc`` format; errors carry line numbers."""
    n: int | None = None
    inames: tuple[str, ...] | None = None
    names: list[str] = []
    rows: list[tuple[int, ...]] = []
    seen_rows: dict[tuple[int, ...], int] = {}
    for lineno, raw in enumerate(text.split("\n"), start=1):
        line = raw.rstrip("\r")
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        if n is None:
            parts = line.split()
            if len(parts) != 2 or parts[0] != "instances" or not parts[1].isdigit() or int(parts[1]) < 1:
                raise InputError(f"line {lineno}: expected 'instances <n>' with n >= 1", line=lineno)
            n = int(parts[1])
            continue
        if line.startswith("instance-names"):
            if inames is not None or rows:
                raise InputError(f"line {lineno}: instance-names must precede hypotheses", line=lineno)
            parts = line.split()[1:]
            if len(parts) != n:
                raise InputError(f"line {lineno}: expected {n} instance names, got {len(parts)}", line=lineno)
            if len(set(parts)) != n:
                raise InputError(f"line {lineno}: instance names must be distinct", line=lineno)
            inames = tuple(parts)
            continue
        if ":" not in line:
            raise InputError(f"line {lineno}: expected '<name>: <bits>'", line=lineno)
        name, _, bits = line.partition(":")
        name = name.strip()
        if not name or name in names:
            raise InputError(f"line {lineno}: missing or repeated hypothesis name {name!r}", line=lineno)
        tokens = bits.split()
        if len(tokens) != n:
            raise InputError(f"line {lineno}: expected {n} labels, got {len(tokens)}", line=lineno)
        bad = [t for t in tokens if t not in ("0", "1")]
        if bad:
            raise InputError(f"line {lineno}: non-bit token {bad[0]!r}", line=lineno)
        row = tuple(int(t) for t in tokens)
        if row in seen_rows:
            raise InputError(
                f"line {lineno}: duplicate of the hypothesis on line {seen_rows[row]}",
                line=lineno,
                reason="duplicate",
            )
        seen_rows[row] = lineno
        names.append(name)
        rows.append(row)
        if len(rows) > max_hypotheses:
            raise ResourceError(f"more than {max_hypotheses} hypotheses", reason="class-too-large")
    if n is None:
        raise InputError("empty class file: missing 'instances <n>' header")
    if not rows:
        raise InputError("class file lists no hypotheses")
    return HypothesisClass(tuple(rows), inames, tuple(names), max_hypotheses=max_hypotheses)


def load_hc(path: str, **kw) -> HypothesisClass:
    with open(path, encoding="utf-8") as fh:
        return parse_hc(fh.read(), **kw)


def dump_hc(cls: HypothesisClass, path: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(cls.to_hc())


# operations


def consistent(h: int, cls: HypothesisClass, Z: Iterable[LabeledExample]) -> bool:
    cls.check_hypothesis(h)
    row = cls.rows[h]
    ok = True
    for x, y in Z:
        cls.check_instance(x)
        ok = ok and row[x] == y
    return ok


def version_space(cls: HypothesisClass, Z: Iterable[LabeledExample], within: int | None = None) -> int:
    H = cls.full if within is None else within
    for z in Z:
        H &= cls.example_mask(z)
    return H


def hamming(cls: HypothesisClass, h: int, hp: int) -> int:
    cls.check_hypothesis(h)
    cls.check_hypothesis(hp)
    return popcount(cls.code(h) ^ cls.code(hp))


def disjoint_union(a: HypothesisClass, b: HypothesisClass) -> HypothesisClass:
    """Hypothesis (i, j) sits at index ``i * b.m + j`` and labels a's instances
    first, then b's instances shifted by ``a.n``."""
    rows = tuple(ra + rb for ra in a.rows for rb in b.rows)
    inames = None
    if a.instance_names or b.instance_names:
        left = [a.instance_name(x) for x in range(a.n)]
        right = [b.instance_name(x) for x in range(b.n)]
        if len(set(left + right)) == len(left) + len(right):
            inames = tuple(left + right)
    return HypothesisClass(rows, inames, max_hypotheses=max(a.max_hypotheses, b.max_hypotheses))


def project(cls_a: HypothesisClass, cls_b: HypothesisClass, H: int) -> tuple[int, int]:
    """Split a union version space into its two factor projections."""
    mb = cls_b.m
    Ha = Hb = 0
    for idx in members(H):
        i, j = divmod(idx, mb)
        Ha |= 1 << i
        Hb |= 1 << j
    return Ha, Hb


def powerset_class(k: int, cap: int = POWERSET_CAP) -> HypothesisClass:
    if k < 1:
        raise InputError("powerset size must be at least 1")
    if k > cap:
        raise ResourceError(f"powerset({k}) exceeds the cap of {cap}", reason="powerset-too-large")
    rows = tuple(tuple((i >> (k - 1 - x)) & 1 for x in range(k)) for i in range(1 << k))
    names = tuple(f"x{x}" for x in range(k))
    hnames = tuple(format(i, f"0{k}b") for i in range(1 << k))
    return HypothesisClass(rows, names, hnames)


WARMUTH_ROWS = (
    "11000", "01100", "00110", "00011", "10001",
    "11010", "01101", "10110", "01011", "10101",
)


def warmuth_class() -> HypothesisClass:
    rows = tuple(tuple(int(c) for c in s) for s in WARMUTH_ROWS)
    return HypothesisClass(
        rows,
        tuple(f"x{i}" for i in range(1, 6)),
        tuple(f"h{i}" for i in range(1, 11)),
    )


def chain_class() -> HypothesisClass:
    rows = ((0, 0, 0), (1, 0, 0), (1, 1, 0), (1, 1, 1))
    return HypothesisClass(rows, ("x0", "x1", "x2"), ("000", "100", "110", "111"))


def singleton_class(n: int = 1) -> HypothesisClass:
    return HypothesisClass(((0,) * n,))


def class_from_strings(rows: Sequence[str], **kw) -> HypothesisClass:
    return HypothesisClass(tuple(tuple(int(c) for c in r) for r in rows), **kw)


def realizable_version_spaces(cls: HypothesisClass, budget: int | None = None) -> list[int]:
    """All distinct masks of the form H(Z), in discovery order (full class first)."""
    seen = {cls.full}
    order = [cls.full]
    frontier = [cls.full]
    while frontier:
        nxt = []
        for H in frontier:
            for x in range(cls.n):
                for y in (0, 1):
                    H2 = H & cls.agree_mask(x, y)
                    if H2 and H2 not in seen:
                        seen.add(H2)
                        order.append(H2)
                        nxt.append(H2)
                        if budget is not None and len(order) > budget:
                            raise ResourceError(
                                f"more than {budget} realizable version spaces", reason="enumeration-budget"
                            )
        frontier = nxt
    return order


def random_class(rng, n: int, m: int) -> HypothesisClass:
    """Uniform sample of ``m`` distinct rows over ``n`` instances."""
    if m > 1 << n:
        raise InputError(f"cannot pick {m} distinct rows over {n} instances")
    codes = rng.sample(range(1 << n), m)
    rows = tuple(tuple((c >> (n - 1 - x)) & 1 for x in range(n)) for c in codes)
    return HypothesisClass(rows)


def all_subsets(items: Sequence[int], max_size: int | None = None):
    top = len(items) if max_size is None else min(max_size, len(items))
    for k in range(top + 1):
        yield from itertools.combinations(items, k)
