"""Local preferences beat version-space preferences on powerset(7); doubling a
local preference at most doubles its teaching cost.

    python3 demos/powerset_gap.py
"""
from __future__ import annotations

import time

from teachdim.constructions import double_sigma, powerset7_sigma, star_sigma, teaching_sequence
from teachdim.engines import nctd_powerset_lower_bound, td_of_sigma
from teachdim.preference import check_family, is_collusion_free


def main() -> None:
    t0 = time.perf_counter()
    cls, tree, sigma = powerset7_sigma()
    td = td_of_sigma(cls, sigma, 0).value
    print(f"powerset(7): tree with {len(tree.nodes())} nodes, depth {tree.depth()}")
    print(f"  local TD {td}; any version-space learner needs at least {nctd_powerset_lower_bound(7)}")
    print(f"  local {check_family(sigma, 'local').holds}, win-stay lose-shift {check_family(sigma, 'wsls').holds}, "
          f"collusion-free {is_collusion_free(sigma, cls, 0).holds}")
    for name in ("h1", "h9", "h44", "h115"):
        v = tree.index_of(name)
        seq = " ".join(f"(x{x},{y})" for x, y in teaching_sequence(cls, tree, v))
        print(f"  {name:>4} = {cls.bitstring(v)}  taught by {seq}")
    print(f"  ({time.perf_counter() - t0:.2f}s)")

    print("\ndoubling the one-instance star:")
    s = star_sigma(1)
    for _ in range(3):
        print(f"  powerset({s.cls.n}): TD {td_of_sigma(s.cls, s, 0).value}, "
              f"version-space bound {nctd_powerset_lower_bound(s.cls.n)}")
        if s.cls.n < 4:
            s = double_sigma(s)


if __name__ == "__main__":
    main()
