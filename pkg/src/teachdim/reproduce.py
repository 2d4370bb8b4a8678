"""End-to-end reproductions with their expected values baked in.

Each function returns a report dict with ``checks``: a list of
``{"name", "expected", "got", "ok"}`` items.  The CLI exits 1 when any check
fails.
"""
from __future__ import annotations

from typing import Callable

from .constructions import (
    certify_union,
    double_sigma,
    powerset7_sigma,
    star_sigma,
    teaching_sequence,
    tree_to_local_sigma,
    wsls_td1_possible,
    wsls_tree,
)
from .engines import (
    count_pref_relations,
    is_nonclashing,
    nctd,
    nctd_powerset_lower_bound,
    powerset_td_lower_bound,
    rtd,
    td_of_sigma,
    vcd,
    wc_td,
    weak_orders,
)
from .fixtures import WARMUTH_DIMENSIONS, WARMUTH_TD, warmuth_sigmas
from .hypotheses import LabeledExample, disjoint_union, powerset_class, warmuth_class
from .preference import check_family, is_collusion_free

FAMILY_SIZES = {1: 1, 2: 3, 3: 13, 4: 75, 5: 541, 6: 4683, 7: 47293}
LOWER_BOUNDS = {1: 1, 7: 1, 64: 9}


def _check(name: str, expected, got) -> dict:
    return {"name": name, "expected": expected, "got": got, "ok": expected == got}


def table2(budget: int | None = None) -> dict:
    cls = warmuth_class()
    checks = []
    for fam, sigma in warmuth_sigmas(cls).items():
        got = td_of_sigma(cls, sigma, 0, budget=budget).value
        checks.append(_check(f"TD(sigma_{fam}), h0=h1", WARMUTH_TD[fam], got))
    got = {"vcd": vcd(cls).value, "wctd": wc_td(cls).value, "rtd": rtd(cls).value}
    nc = nctd(cls, budget=budget)
    got["nctd"] = nc.value
    for k, v in WARMUTH_DIMENSIONS.items():
        checks.append(_check(k.upper() if k != "wctd" else "wc-TD", v, got[k]))
    checks.append(_check("NCTD witness is non-clashing", True, is_nonclashing(cls, nc.witness).holds))
    return {"target": "table2", "checks": checks}


def powerset7_gap(budget: int | None = None) -> dict:
    cls, tree, sigma = powerset7_sigma()
    h9 = tree.index_of("h9")
    seq = [list(z) for z in teaching_sequence(cls, tree, h9)]
    checks = [
        _check("tree nodes", 128, len(tree.nodes())),
        _check("tree depth", 3, tree.depth()),
        _check("TD(sigma_tree), h0=0000000", 3, td_of_sigma(cls, sigma, 0, budget=budget).value),
        _check("local", True, check_family(sigma, "local").holds),
        _check("wsls", True, check_family(sigma, "wsls").holds),
        _check("collusion-free", True, is_collusion_free(sigma, cls, 0).holds),
        _check("sequence of h9", [[0, 1], [2, 1]], seq),
        _check("NCTD lower bound ceil(7/2)", 4, nctd_powerset_lower_bound(7)),
    ]
    gap = nctd_powerset_lower_bound(7) - checks[2]["got"]
    checks.append(_check("gvs minus local is at least 1", True, gap >= 1))
    return {"target": "powerset7-gap", "checks": checks}


def subadditivity(budget: int | None = None) -> dict:
    checks = []
    factors = []
    for k in (3, 4):
        cls = powerset_class(k)
        checks.append(_check(f"no wsls sigma teaches powerset({k}) in 1 example", None, wsls_td1_possible(k)))
        sigma = tree_to_local_sigma(cls, wsls_tree(k))
        factors.append(sigma)
        checks.append(_check(f"wsls TD of the depth-2 tree on powerset({k})", 2,
                             td_of_sigma(cls, sigma, 0, budget=budget).value))
    cert = certify_union(factors[0], 0, factors[1], 0)
    checks.append(_check("union of factor sigmas is sub-additive", True, cert["subadditive"]))
    checks.append(_check("TD of the additive union sigma", 4, cert["td_union"]))
    union = disjoint_union(powerset_class(3), powerset_class(4))
    checks.append(_check("union class equals powerset(7)", True, union.rows == powerset_class(7).rows))
    cls7, _, sigma7 = powerset7_sigma()
    checks.append(_check("wsls TD of the seven-instance tree on the union", 3,
                         td_of_sigma(cls7, sigma7, 0, budget=budget).value))
    checks.append(_check("3 < 2 + 2", True, 3 < 2 + 2))
    return {"target": "subadditivity", "checks": checks}


def family_sizes(m: int = 5) -> dict:
    got = count_pref_relations(m)
    checks = []
    if m in FAMILY_SIZES:
        checks.append(_check(f"C({m})", FAMILY_SIZES[m], got))
    if m <= 7:
        checks.append(_check(f"weak orders on {m} elements", got, sum(1 for _ in weak_orders(m))))
    return {"target": "family-sizes", "m": m, "value": got, "checks": checks}


def lower_bounds(d: int = 7, budget: int | None = None) -> dict:
    got = powerset_td_lower_bound(d)
    checks = []
    if d in LOWER_BOUNDS:
        checks.append(_check(f"lower bound for d={d}", LOWER_BOUNDS[d], got))
    if d <= 3:
        cls = powerset_class(d)
        for name, sigma in _collusion_free_corpus(d).items():
            td = td_of_sigma(cls, sigma, 0, budget=budget).value
            checks.append(_check(f"bound <= TD({name})", True, got <= td))
    return {"target": "lower-bounds", "d": d, "value": got, "checks": checks}


def _collusion_free_corpus(d: int) -> dict:
    from .preference import build_const, build_local_hamming

    cls = powerset_class(d)
    out = {"const": build_const(cls), "hamming": build_local_hamming(cls), "star": star_sigma(d)}
    if d <= 4:
        out["depth-2 tree"] = tree_to_local_sigma(cls, wsls_tree(d))
    if d == 2:
        out["doubled star"] = double_sigma(star_sigma(1))
    return out


TARGETS: dict[str, Callable[..., dict]] = {
    "table2": table2,
    "powerset7-gap": powerset7_gap,
    "subadditivity": subadditivity,
    "family-sizes": family_sizes,
    "lower-bounds": lower_bounds,
}


def all_ok(report: dict) -> bool:
    return all(c["ok"] for c in report["checks"])
