"""Acceptance criteria 1-8.  Each test prints one PASS/FAIL line."""
from __future__ import annotations

import random
import time

import pytest

import oracles
from helpers import dense_lvs, random_collusion_free_gvs, random_sigma
from teachdim.constructions import (
    check_normalized,
    double_sigma,
    local_td1_row,
    powerset7_sigma,
    star_sigma,
    teaching_sequence,
    tree_to_local_sigma,
    wsls_disjoint_union_sigma,
    wsls_td1_possible,
    wsls_tree,
)
from teachdim.engines import (
    count_pref_relations,
    d_sigma,
    initial_target_cost,
    is_nonclashing,
    nctd,
    nctd_powerset_lower_bound,
    powerset_td_lower_bound,
    rtd,
    sigma_from_teacher,
    sigma_td_global,
    td_of_sigma,
    vcd,
    wc_td,
    witness_mapping,
)
from teachdim.fixtures import adversarial_class, adversarial_sigma, warmuth_sigmas
from teachdim.hypotheses import disjoint_union, powerset_class, random_class, version_space, warmuth_class
from teachdim.hypotheses import LabeledExample as Z
from teachdim.preference import build_const, build_global, check_family, is_collusion_free


class Outcome:
    def __init__(self, number: int, title: str):
        self.number, self.title = number, title
        self.failures: list[str] = []
        self.start = time.perf_counter()

    def check(self, ok: bool, what: str) -> None:
        if not ok:
            self.failures.append(what)

    def finish(self, capsys, limit: float | None = None) -> None:
        elapsed = time.perf_counter() - self.start
        if limit is not None and elapsed > limit:
            self.failures.append(f"took {elapsed:.1f}s, limit {limit}s")
        status = "PASS" if not self.failures else "FAIL"
        detail = "" if not self.failures else " | " + "; ".join(self.failures[:5])
        with capsys.disabled():
            print(f"\n{status} criterion {self.number}: {self.title} ({elapsed:.2f}s){detail}")
        assert not self.failures, self.failures


def test_criterion_1_warmuth_table(capsys):
    out = Outcome(1, "Warmuth TD per family from h1 is 3/3/2/2/1")
    W = warmuth_class()
    S = warmuth_sigmas(W)
    want = {"const": 3, "global": 3, "gvs": 2, "local": 2, "lvs": 1}
    got = {fam: td_of_sigma(W, S[fam], 0).value for fam in want}
    out.check(got == want, f"got {got}")
    out.finish(capsys, limit=1.0)


def test_criterion_2_warmuth_dimensions(capsys):
    out = Outcome(2, "Warmuth wc-TD 3, RTD 3, NCTD 2, VCD 2")
    W = warmuth_class()
    rows = oracles.rows_of(W)
    out.check(wc_td(W).value == 3 == oracles.wc_td(rows), "wc-TD")
    out.check(rtd(W).value == 3, "RTD")
    out.check(vcd(W).value == 2 == oracles.vcd(rows), "VCD")
    t0 = time.perf_counter()
    r = nctd(W)
    out.check(time.perf_counter() - t0 < 30, "NCTD search slower than 30s")
    out.check(r.value == 2, f"NCTD {r.value}")
    out.check(is_nonclashing(W, r.witness).holds, "NCTD witness clashes")
    out.check(max(len(s) for s in r.witness.values()) == 2, "witness sizes")
    out.finish(capsys)


def test_criterion_3_batch_equivalences(capsys, corpus):
    out = Outcome(3, f"const/global/gvs batch equivalences on {len(corpus)} classes")
    out.check(len(corpus) >= 200, "corpus too small")
    rng = random.Random(33)
    for i, cls in enumerate(corpus):
        wc = wc_td(cls).value
        r = rtd(cls).value
        const = build_const(cls)
        for h0 in range(cls.m):
            v = td_of_sigma(cls, const, h0).value
            out.check(v == wc, f"class {i} h0 {h0}: const TD {v} != wc-TD {wc}")
            g = sigma_td_global(cls, h0).value
            out.check(g == r, f"class {i} h0 {h0}: global TD {g} != RTD {r}")
        nc = nctd(cls)
        T = nc.witness
        s_T = sigma_from_teacher(cls, T)
        gvs_sigmas = [s_T, const, random_sigma(rng, cls, "global")]
        h0 = rng.randrange(cls.m)
        extra = random_collusion_free_gvs(rng, cls, h0)
        if extra is not None:
            gvs_sigmas.append(extra)
        for j, sigma in enumerate(gvs_sigmas):
            if not is_collusion_free(sigma, cls, h0).holds:
                out.check(j >= 2, f"class {i}: constructed gvs sigma {j} is not collusion-free")
                continue
            res = td_of_sigma(cls, sigma, h0)
            mapping = witness_mapping(res)
            out.check(is_nonclashing(cls, mapping).holds, f"class {i} sigma {j}: witness mapping clashes")
        for h0 in range(cls.m):
            v = td_of_sigma(cls, s_T, h0).value
            out.check(v <= max(nc.value, 1 if cls.m > 1 else 0),
                      f"class {i} h0 {h0}: TD(sigma_T) {v} > max|T| {nc.value}")
    out.finish(capsys)


def test_criterion_4_powerset7_gap(capsys):
    out = Outcome(4, "powerset-7 local sigma has TD 3 below the NCTD bound 4")
    cls, tree, sigma = powerset7_sigma()
    out.check(td_of_sigma(cls, sigma, 0).value == 3, "TD")
    for fam in ("local", "wsls"):
        out.check(check_family(sigma, fam).holds, fam)
    out.check(is_collusion_free(sigma, cls, 0).holds, "collusion-free")
    h9 = tree.index_of("h9")
    out.check(teaching_sequence(cls, tree, h9) == (Z(0, 1), Z(2, 1)), "h9 sequence")
    lb = nctd_powerset_lower_bound(7)
    out.check(lb == 4 and lb - 3 >= 1, f"NCTD lower bound {lb}")
    out.finish(capsys, limit=10.0)


def test_criterion_5_doubling(capsys):
    out = Outcome(5, "two doublings of the star sigma give TD <= 4 on powerset(4)")
    s1 = star_sigma(1)
    out.check(td_of_sigma(s1.cls, s1, 0).value == 1, "base TD")
    s2 = double_sigma(s1)
    s4 = double_sigma(s2)
    t2 = td_of_sigma(s2.cls, s2, 0).value
    t4 = td_of_sigma(s4.cls, s4, 0).value
    out.check(s4.cls.n == 4 and t2 <= 2 and t4 <= 4, f"TDs {t2}, {t4}")
    try:
        check_normalized(s4)
    except Exception as e:  # noqa: BLE001
        out.check(False, f"normalization: {e}")
    out.check(is_collusion_free(s4, s4.cls, 0).holds, "collusion-free")
    out.finish(capsys, limit=60.0)


def test_criterion_6_strict_subadditivity(capsys):
    out = Outcome(6, "union of powerset(3) and powerset(4) has TD 3 < 2 + 2")
    for k in (3, 4):
        out.check(wsls_td1_possible(k) is None, f"wsls TD 1 found on powerset({k})")
        s = tree_to_local_sigma(powerset_class(k), wsls_tree(k))
        out.check(td_of_sigma(s.cls, s, 0).value == 2, f"depth-2 tree TD on powerset({k})")
    a = tree_to_local_sigma(powerset_class(3), wsls_tree(3))
    b = tree_to_local_sigma(powerset_class(4), wsls_tree(4))
    additive = wsls_disjoint_union_sigma(a, b)
    out.check(td_of_sigma(additive.cls, additive, 0).value <= 4, "additive union TD")
    union = disjoint_union(powerset_class(3), powerset_class(4))
    cls, _, sigma = powerset7_sigma()
    out.check(union.rows == cls.rows, "union is not powerset(7)")
    tu = td_of_sigma(cls, sigma, 0).value
    out.check(tu == 3 and tu < 2 + 2, f"union TD {tu}")
    out.check(check_family(sigma, "wsls").holds, "union sigma wsls")
    out.finish(capsys)


def test_criterion_7_counting(capsys):
    out = Outcome(7, "weak-order counts and the powerset lower bound")
    got = [count_pref_relations(m) for m in range(1, 6)]
    out.check(got == [1, 3, 13, 75, 541], f"counts {got}")
    out.check(got == [oracles.weak_order_count(m) for m in range(1, 6)], "brute-force counts")
    rng = random.Random(7)
    for d in (1, 2, 3):
        P = powerset_class(d)
        lb = powerset_td_lower_bound(d)
        sigmas = [build_const(P), star_sigma(d), build_global(P, list(range(P.m)))]
        if d > 1:
            sigmas.append(tree_to_local_sigma(P, wsls_tree(d)))
        sigmas += [random_sigma(rng, P, f) for f in ("global", "gvs", "local", "lvs") for _ in range(4)]
        for sigma in sigmas:
            h0 = 0
            if is_collusion_free(sigma, P, h0).holds:
                v = td_of_sigma(P, sigma, h0).value
                out.check(lb <= v, f"d={d}: bound {lb} > TD {v}")
    for d in (1, 7, 64, 1000, 10**6):
        lb = powerset_td_lower_bound(d)
        ok = (2 * d) ** (lb + 1) > 2 ** d and (lb == 0 or (2 * d) ** lb <= 2 ** d)
        out.check(ok, f"d={d}: {lb} does not satisfy the inequality")
    out.check([powerset_td_lower_bound(d) for d in (1, 7, 64)] == [1, 1, 9], "frozen values")
    out.finish(capsys)


def test_criterion_8_properties(capsys, corpus):
    out = Outcome(8, "antitonicity, minimax equivalence, collusion checks, local TD 1 implies RTD 1")
    rng = random.Random(88)
    # version-space antitonicity
    for cls in corpus[:100]:
        t = rng.randrange(cls.m)
        Zs = [Z(x, cls.label(t, x)) for x in rng.sample(range(cls.n), cls.n)]
        prev = cls.full
        for k in range(1, len(Zs) + 1):
            cur = version_space(cls, Zs[:k])
            out.check(cur & ~prev == 0 and (cur >> t) & 1, "antitonicity")
            prev = cur
    # memoized engine against the straight-line search
    for _ in range(80):
        n = rng.choice([1, 2, 3])
        cls = random_class(rng, n, rng.randint(1, min(6, 2 ** n)))
        rows = oracles.rows_of(cls)
        for sigma in (random_sigma(rng, cls, rng.choice(["const", "global", "gvs", "local", "lvs"])),
                      dense_lvs(rng, cls, 2)):
            for h0 in range(cls.m):
                for t in range(cls.m):
                    if t == h0:
                        got = initial_target_cost(cls, sigma, h0)
                        want = 0 if cls.m == 1 else oracles.minimax(sigma, rows, t, h0, forced_first=True)
                    else:
                        got = d_sigma(cls, sigma, cls.full, h0, t)
                        want = oracles.minimax(sigma, rows, t, h0)
                    out.check(got == want, f"d_sigma {got} vs minimax {want} on {cls.rows}")
    # constructed preferences are collusion-free; the adversarial one is not
    cls7, _, s7 = powerset7_sigma()
    s2 = double_sigma(star_sigma(1))
    constructed = [
        (star_sigma(1), 0), (star_sigma(3), 0), (s7, 0), (s2, 0), (double_sigma(s2), 0),
        (tree_to_local_sigma(powerset_class(3), wsls_tree(3)), 0),
        (wsls_disjoint_union_sigma(star_sigma(1), star_sigma(2)), 0),
        (sigma_from_teacher(warmuth_class(), nctd(warmuth_class()).witness), 0),
    ]
    for sigma, h0 in constructed:
        out.check(is_collusion_free(sigma, sigma.cls, h0).holds, f"constructed sigma on m={sigma.cls.m} rejected")
    A = adversarial_class()
    v = is_collusion_free(adversarial_sigma(A), A, 2)
    out.check(not v.holds and v.counterexample["S"] == [[0, 0]], "adversarial sigma accepted")
    # a local learner taught everything in one example forces RTD 1
    for cls in corpus:
        if cls.m > 1 and local_td1_row(cls) is not None:
            out.check(rtd(cls).value == 1, f"local TD 1 but RTD {rtd(cls).value}")
    out.finish(capsys)
