"""Teach every Warmuth hypothesis under each preference family and print the runs.

    python3 demos/warmuth_walkthrough.py
"""
from __future__ import annotations

from teachdim.engines import nctd, rtd, td_of_sigma, vcd, wc_td
from teachdim.fixtures import warmuth_sigmas
from teachdim.hypotheses import warmuth_class
from teachdim.learner import run_protocol


def main() -> None:
    W = warmuth_class()
    print("class:")
    for h in range(W.m):
        print(f"  {W.hypothesis_name(h)}  {W.bitstring(h)}")
    print(f"VCD {vcd(W).value}, wc-TD {wc_td(W).value}, RTD {rtd(W).value}, NCTD {nctd(W).value}")

    for fam, sigma in warmuth_sigmas(W).items():
        res = td_of_sigma(W, sigma, 0)
        print(f"\n{fam}: TD from h1 = {res.value}")
        for t, seq in sorted(res.witness.items()):
            tr = run_protocol(W, sigma, 0, t, seq)
            shown = " ".join(f"({W.instance_name(x)},{y})" for x, y in seq)
            print(f"  {W.hypothesis_name(t):>3}: {shown:<28} reached after {tr.steps_used}")

    # a single run in full, with the learner's candidate sets
    sigma = warmuth_sigmas(W)["local"]
    res = td_of_sigma(W, sigma, 0)
    print("\nlocal learner taught h3:")
    print(run_protocol(W, sigma, 0, 2, res.witness[2]).dump(W))


if __name__ == "__main__":
    main()
