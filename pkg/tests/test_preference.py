from __future__ import annotations

import itertools
import json
import random

import pytest

from helpers import random_sigma
from teachdim import BindingError, DomainError, InputError
from teachdim._bits import mask_of, members
from teachdim.fixtures import (
    WARMUTH_GVS_PAIRS,
    WARMUTH_LVS_OPTIONAL,
    adversarial_class,
    adversarial_sigma,
    warmuth_gvs,
    warmuth_lvs,
    warmuth_sigmas,
)
from teachdim.hypotheses import LabeledExample as Z, chain_class, powerset_class, realizable_version_spaces, version_space, warmuth_class
from teachdim.preference import (
    VersionSpacePattern,
    build_const,
    build_global,
    build_gvs,
    build_local_hamming,
    build_local_table,
    build_lvs,
    check_family,
    is_collusion_free,
    loads_pref,
    recheck,
)

W = warmuth_class()
S = warmuth_sigmas(W)


def H_of(*names):
    return mask_of(W.hypothesis_index(n) for n in names)


def test_pattern_semantics():
    p = VersionSpacePattern.of([1], [2, 3])
    assert p.matches(mask_of([1])) and p.matches(mask_of([1, 2, 3]))
    assert not p.matches(mask_of([2])) and not p.matches(mask_of([1, 4]))
    with pytest.raises(InputError):
        VersionSpacePattern.of([1], [1])


def test_eval_examples():
    assert all(S["const"].eval(hp, H, h) == 0 for hp, H, h in [(0, W.full, 0), (3, 5, 7)])
    assert S["local"].eval(2, W.full, 0) == 4
    assert S["gvs"].eval(0, H_of("h1", "h6"), 4) == 0
    assert S["gvs"].eval(0, W.full, 4) == 1


def test_hamming_row_h1():
    assert build_local_hamming(W).rank_row(W.full, 0) == (0, 2, 4, 4, 2, 1, 3, 3, 3, 3)


def test_gvs_zero_exactly_on_listed_pairs():
    sigma = warmuth_gvs(W)
    listed = set()
    for h, other in WARMUTH_GVS_PAIRS.items():
        listed.add((h - 1, mask_of([h - 1, other - 1])))
        listed.add((h - 1, mask_of([h - 1])))
    assert len(listed) == 20
    zeros = {(hp, H) for H in range(1, W.full + 1) for hp in members(H) if sigma.eval(hp, H, 0) == 0}
    assert zeros == listed


def test_argmin_examples():
    H = version_space(W, [Z(2, 1)])
    assert {W.hypothesis_name(i) for i in members(H)} == {"h2", "h3", "h7", "h8", "h10"}
    assert S["local"].argmin_set(H, 0) == {1}
    assert S["const"].argmin_set(H, 3) == frozenset(members(H))
    lvs = warmuth_lvs(W)
    for r in range(5):
        for extra in itertools.combinations(["h5", "h6", "h8", "h10"], r):
            H = H_of("h1", *extra)
            # another member ties only when H fits inside its own {h'} u {...}* pattern
            tied = {0} | {
                W.hypothesis_index(e)
                for e in extra
                if all(int(o[1:]) in WARMUTH_LVS_OPTIONAL[int(e[1:])] for o in ("h1", *extra) if o != e)
            }
            assert lvs.argmin_set(H, 0) == tied
    assert lvs.argmin_set(H_of("h1", "h5", "h10"), 0) == {0}
    with pytest.raises(DomainError):
        S["const"].argmin_set(0, 0)


def test_argmin_const_is_whole_space():
    sigma = build_const(W)
    for H in realizable_version_spaces(W):
        assert sigma.argmin_mask(H, 3) == H


def test_family_checks_on_warmuth():
    assert check_family(S["const"], "const").holds
    v = check_family(S["local"], "global")
    assert not v.holds and recheck(S["local"], v)
    assert check_family(S["local"], "local").holds
    lvs = S["lvs"]
    assert check_family(lvs, "lvs").holds
    v = check_family(lvs, "gvs")
    assert not v.holds and recheck(lvs, v)
    c = v.counterexample
    assert c["first"]["H"] == c["second"]["H"]


def test_own_tag_holds_for_builders():
    rng = random.Random(3)
    cls = chain_class()
    for fam in ("const", "global", "local"):
        s = random_sigma(rng, cls, fam)
        assert check_family(s, fam).holds
    assert check_family(warmuth_gvs(W), "gvs").holds


def _venn_consistent(sigma):
    got = {f: check_family(sigma, f).holds for f in ("const", "global", "gvs", "local", "lvs")}
    assert got["lvs"]
    if got["const"]:
        assert got["global"]
    if got["global"]:
        assert got["gvs"] and got["local"]
    # global is exactly the intersection of gvs and local
    assert got["global"] == (got["gvs"] and got["local"])
    for f, ok in got.items():
        if not ok:
            assert recheck(sigma, check_family(sigma, f))
    return got


def test_venn_and_intersection_on_random_tables(small_corpus):
    rng = random.Random(11)
    for cls in small_corpus:
        for fam in ("const", "global", "gvs", "local", "lvs"):
            _venn_consistent(random_sigma(rng, cls, fam))


def test_venn_on_fixtures():
    for s in S.values():
        _venn_consistent(s)


def test_wsls_check():
    assert check_family(build_local_hamming(W), "wsls").holds
    v = check_family(build_const(W), "wsls")
    assert not v.holds and recheck(build_const(W), v)


def test_collusion_free_examples():
    assert is_collusion_free(build_const(W), W, 0).holds
    assert is_collusion_free(build_local_hamming(W), W, 3).holds
    A = adversarial_class()
    v = is_collusion_free(adversarial_sigma(A), A, 2)
    assert not v.holds
    c = v.counterexample
    assert c["S"] == [[0, 0]]
    assert c["h_hat"] == 0 and c["argmin"] == [1]
    assert recheck(adversarial_sigma(A), v)


def test_global_sigmas_are_collusion_free(small_corpus):
    rng = random.Random(5)
    for cls in small_corpus[:30]:
        s = random_sigma(rng, cls, "global")
        for h0 in range(cls.m):
            assert is_collusion_free(s, cls, h0).holds


def test_builder_errors():
    with pytest.raises(InputError):
        build_global(W, [0] * 9)
    with pytest.raises(InputError):
        build_local_table(W, [[0] * 10] * 9)
    with pytest.raises(InputError):
        build_gvs(W, [(VersionSpacePattern(1 << 12), [0] * 10)])
    with pytest.raises(InputError):
        build_global(W, [float("nan")] + [0] * 9)
    with pytest.raises(BindingError):
        check_family(S["const"], "const", chain_class())


def test_exact_ranks():
    from fractions import Fraction

    s = build_global(chain_class(), [0.1, Fraction(1, 10), 1, 2])
    # 0.1 as a float is not 1/10, so the two do not tie
    assert s.argmin_set(chain_class().full, 0) == {1}


def test_pref_round_trip():
    for s in list(S.values()) + [adversarial_sigma()]:
        again = loads_pref(s.dumps(), s.cls)
        assert again.to_json() == s.to_json()
        for H in realizable_version_spaces(s.cls):
            for h in range(s.cls.m):
                assert again.rank_row(H, h) == s.rank_row(H, h)


def test_pref_rejects_wrong_class():
    text = S["gvs"].dumps()
    with pytest.raises(BindingError) as err:
        loads_pref(text, powerset_class(3))
    assert err.value.reason == "hash-mismatch"
    obj = json.loads(text)
    obj["entries"]["kind"] = "nope"
    with pytest.raises(InputError):
        loads_pref(json.dumps(obj), W)
    with pytest.raises(InputError):
        loads_pref("{", W)
