"""Command-line interface.

Exit codes: 0 success, 1 a reproduction or verification mismatch, 2 bad input,
3 a size cap or search budget was hit.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from typing import Any, Sequence

from . import __version__
from .constructions import (
    double_sigma,
    find_gvs_beats_local_class,
    order_to_global_sigma,
    powerset7_sigma,
    star_sigma,
    wsls_disjoint_union_sigma,
)
from .engines import (
    DimensionResult,
    TeacherMapping,
    _jsonable,
    count_pref_relations,
    default_budget,
    is_nonclashing,
    nctd,
    rtd,
    td_of_sigma,
    vcd,
    wc_td,
)
from .errors import InputError, ResourceError, TeachDimError
from .fixtures import adversarial_class, adversarial_sigma, warmuth_sigmas, warmuth_teacher
from .hypotheses import (
    HypothesisClass,
    LabeledExample,
    chain_class,
    load_hc,
    parse_hc,
    powerset_class,
    singleton_class,
    warmuth_class,
)
from .learner import TIE_MODES, parse_sequence, run_protocol
from .preference import (
    CHECKABLE,
    PreferenceFunction,
    build_const,
    build_local_hamming,
    check_family,
    is_collusion_free,
    load_pref,
    pref_from_json,
)
from . import reproduce as repro

OK, MISMATCH, BAD_INPUT, RESOURCE = 0, 1, 2, 3


# input resolution


def resolve_class(spec: str) -> HypothesisClass:
    """A path to a .hc file, or one of warmuth, chain, singleton, adversarial, powerset:K."""
    if os.path.exists(spec):
        return load_hc(spec)
    if spec == "warmuth":
        return warmuth_class()
    if spec == "chain":
        return chain_class()
    if spec == "singleton":
        return singleton_class()
    if spec == "adversarial":
        return adversarial_class()
    if spec.startswith("powerset:"):
        try:
            k = int(spec.split(":", 1)[1])
        except ValueError:
            raise InputError(f"bad powerset size in {spec!r}") from None
        return powerset_class(k)
    raise InputError(f"class file {spec!r} not found")


def resolve_pref(spec: str, cls: HypothesisClass) -> PreferenceFunction:
    """A path to a .pref file, or const, hamming, warmuth:<family>, adversarial, powerset7-local."""
    if os.path.exists(spec):
        return load_pref(spec, cls)
    if spec == "const":
        return build_const(cls)
    if spec == "hamming":
        return build_local_hamming(cls)
    if spec.startswith("warmuth:"):
        fam = spec.split(":", 1)[1]
        table = warmuth_sigmas(cls if cls == warmuth_class() else None)
        if fam not in table or cls != warmuth_class():
            raise InputError(f"{spec!r} needs the warmuth class and one of {sorted(table)}")
        return table[fam]
    if spec == "adversarial":
        if cls != adversarial_class():
            raise InputError("the adversarial preference needs the adversarial class")
        return adversarial_sigma(cls)
    if spec == "powerset7-local":
        pcls, _, sigma = powerset7_sigma()
        if cls != pcls:
            raise InputError("powerset7-local needs powerset:7")
        return sigma
    raise InputError(f"preference file {spec!r} not found")


def _pref_with_inferred_class(path: str, class_spec: str | None) -> PreferenceFunction:
    if class_spec:
        return resolve_pref(path, resolve_class(class_spec))
    with open(path, encoding="utf-8") as fh:
        obj = json.load(fh)
    for k in range(1, 11):
        cls = powerset_class(k)
        if obj.get("class_hash") == cls.digest():
            return pref_from_json(obj, cls)
    raise InputError(f"{path}: pass --class; the hash matches no powerset class")


def _hyp(cls: HypothesisClass, name: str) -> int:
    return cls.hypothesis_index(name)


# output


def _provenance(args, *objs) -> dict:
    hashes = {}
    for label, obj in objs:
        if isinstance(obj, HypothesisClass):
            hashes[label] = obj.digest()
        elif isinstance(obj, PreferenceFunction):
            hashes[label] = obj.cls.digest()
    budget = args.budget_nodes if getattr(args, "budget_nodes", None) else default_budget()
    return {"tool_version": __version__, "input_hashes": hashes, "budget_nodes": budget}


def _emit(args, report: dict, text_lines: list[str]) -> None:
    if args.format == "json":
        print(json.dumps(_jsonable(report), indent=1, sort_keys=True))
    else:
        print("\n".join(text_lines))


def _named_witness(cls: HypothesisClass, r: DimensionResult):
    w = r.witness
    ex = lambda z: f"({cls.instance_name(z[0])},{z[1]})"  # noqa: E731
    if r.measure in ("td_sigma", "wc_td", "nctd") and isinstance(w, dict):
        return {cls.hypothesis_name(h): [ex(z) for z in sorted(s)] if r.measure != "td_sigma" else [ex(z) for z in s]
                for h, s in w.items()}
    if r.measure == "rtd":
        return [cls.hypothesis_name(h) for h in w]
    if r.measure == "vcd":
        return [cls.instance_name(x) for x in w]
    return w


def _result_json(cls: HypothesisClass, r: DimensionResult) -> dict:
    out = r.to_json()
    out["witness"] = _jsonable(_named_witness(cls, r))
    out.pop("details", None)
    return out


# subcommands


def cmd_compute(args) -> int:
    class_spec = args.class_path or args.class_opt
    if not class_spec:
        raise InputError("compute needs a class (positional or --class)")
    cls = resolve_class(class_spec)
    sigma = resolve_pref(args.pref, cls) if args.pref else None
    budget = args.budget_nodes
    wanted = [args.measure] if args.measure != "all" else ["vcd", "wctd", "rtd", "nctd"] + (["tdsigma"] if sigma else [])
    results: list[dict] = []
    lines = []
    for meas in wanted:
        if meas == "tdsigma":
            if sigma is None:
                raise InputError("tdsigma needs --pref")
            h0s = range(cls.m) if args.h0 == "all" else [_hyp(cls, args.h0)]
            vals = {}
            for h0 in h0s:
                r = td_of_sigma(cls, sigma, h0, include_initial=args.include_initial_target, budget=budget)
                item = _result_json(cls, r)
                item["h0"] = cls.hypothesis_name(h0)
                results.append(item)
                vals[cls.hypothesis_name(h0)] = item["value"]
            if len(vals) > 1:
                lines.append(f"TD(sigma) per h0: " + " ".join(f"{k}={v}" for k, v in vals.items()))
                ints = [v for v in vals.values() if isinstance(v, int)]
                lines.append(f"TD(sigma) min={min(ints)} max={max(ints)}")
            else:
                (k, v), = vals.items()
                lines.append(f"TD(sigma) h0={k}: {v}")
            continue
        r = {"vcd": vcd, "wctd": wc_td, "rtd": rtd}.get(meas)
        res = r(cls) if r else nctd(cls, budget=budget)
        results.append(_result_json(cls, res))
        label = {"vcd": "VCD", "wctd": "wc-TD", "rtd": "RTD", "nctd": "NCTD"}[meas]
        lines.append(f"{label}: {res.value}")
    report = {"command": "compute", "results": results, "provenance": _provenance(args, ("class", cls))}
    _emit(args, report, lines)
    return OK


def cmd_simulate(args) -> int:
    cls = resolve_class(args.class_opt)
    sigma = resolve_pref(args.pref, cls)
    h0 = _hyp(cls, args.h0)
    target = _hyp(cls, args.target)
    seq = parse_sequence(cls, args.sequence or "", target)
    traj = run_protocol(cls, sigma, h0, target, seq, args.tie_mode)
    lines = [traj.dump(cls)] if traj.steps else []
    status = "terminated" if traj.terminated else "not terminated"
    lines.append(f"{status} at {cls.hypothesis_name(traj.final)} after {traj.steps_used} steps")
    report = {"command": "simulate", "trajectory": traj.to_json(cls),
              "provenance": _provenance(args, ("class", cls))}
    _emit(args, report, [line for line in lines if line])
    return OK if traj.terminated else MISMATCH


def _load_mapping(cls: HypothesisClass, spec: str) -> TeacherMapping:
    if spec == "warmuth-gvs":
        return TeacherMapping.from_dict(cls, warmuth_teacher(cls))
    try:
        with open(spec, encoding="utf-8") as fh:
            obj = json.load(fh)
    except FileNotFoundError:
        raise InputError(f"mapping file {spec!r} not found") from None
    except json.JSONDecodeError as e:
        raise InputError(f"mapping file is not JSON: {e}") from None
    T = {}
    for h, exs in obj.items():
        hi = _hyp(cls, h)
        T[hi] = [LabeledExample(cls.instance_index(x), int(y)) for x, y in exs]
    return TeacherMapping.from_dict(cls, T)


def cmd_verify(args) -> int:
    cls = resolve_class(args.class_opt)
    verdicts = []
    if args.check == "non-clashing":
        if not args.mapping:
            raise InputError("non-clashing needs --mapping")
        verdicts.append(is_nonclashing(cls, _load_mapping(cls, args.mapping)))
    else:
        if not args.pref:
            raise InputError(f"{args.check} needs --pref")
        sigma = resolve_pref(args.pref, cls)
        if args.check == "collusion-free":
            verdicts.append(is_collusion_free(sigma, cls, _hyp(cls, args.h0), budget=args.budget_nodes or default_budget()))
        else:
            fams = [args.family] if args.family else list(CHECKABLE)
            verdicts.extend(check_family(sigma, f, cls) for f in fams)
    lines = []
    for v in verdicts:
        line = f"{v.family}: {'holds' if v.holds else 'fails'}"
        if v.counterexample:
            line += " " + json.dumps(v.counterexample, sort_keys=True)
        lines.append(line)
    report = {"command": "verify", "verdicts": [v.to_json() for v in verdicts],
              "provenance": _provenance(args, ("class", cls))}
    _emit(args, report, lines)
    ok = all(v.holds for v in verdicts) if args.check != "family" or args.family else True
    return OK if ok else MISMATCH


def _write_outputs(args, cls: HypothesisClass, sigma: PreferenceFunction, cert: dict, stem: str) -> list[str]:
    out = args.out
    if not out:
        return []
    os.makedirs(out, exist_ok=True)
    paths = [os.path.join(out, f"{stem}.hc"), os.path.join(out, f"{stem}.pref"), os.path.join(out, f"{stem}.cert.json")]
    with open(paths[0], "w", encoding="utf-8", newline="\n") as fh:
        fh.write(cls.to_hc())
    with open(paths[1], "w", encoding="utf-8", newline="\n") as fh:
        fh.write(sigma.dumps())
    with open(paths[2], "w", encoding="utf-8", newline="\n") as fh:
        fh.write(json.dumps(_jsonable(cert), indent=1, sort_keys=True) + "\n")
    return paths


def certificate(construction: str, sigma: PreferenceFunction, h0: int, inputs: dict, budget=None) -> dict:
    cls = sigma.cls
    td = td_of_sigma(cls, sigma, h0, budget=budget).value
    checks = {f: check_family(sigma, f).holds for f in ("local", "wsls")}
    checks["collusion-free"] = is_collusion_free(sigma, cls, h0).holds
    return {"construction": construction, "inputs": inputs, "class_hash": cls.digest(), "h0": h0,
            "verified_td": td, "property_checks": checks}


def cmd_construct(args) -> int:
    budget = args.budget_nodes
    what = args.what
    if what == "powerset7-local":
        cls, _, sigma = powerset7_sigma()
        cert = certificate(what, sigma, 0, {}, budget)
        stem = "powerset7_local"
    elif what == "double":
        base = _pref_with_inferred_class(args.inputs[0], args.class_opt) if args.inputs else star_sigma(1)
        sigma = double_sigma(base)
        cls = sigma.cls
        base_td = td_of_sigma(base.cls, base, 0, budget=budget).value
        cert = certificate(what, sigma, 0, {"input_hash": base.cls.digest(), "input_td": base_td}, budget)
        cert["bound_holds"] = cert["verified_td"] <= 2 * base_td
        stem = f"powerset{cls.n}_doubled"
    elif what == "union":
        if len(args.inputs) != 2:
            raise InputError("union needs two .pref inputs")
        a = _pref_with_inferred_class(args.inputs[0], None)
        b = _pref_with_inferred_class(args.inputs[1], None)
        sigma = wsls_disjoint_union_sigma(a, b)
        cls = sigma.cls
        ta = td_of_sigma(a.cls, a, 0, budget=budget).value
        tb = td_of_sigma(b.cls, b, 0, budget=budget).value
        cert = certificate(what, sigma, 0, {"left_hash": a.cls.digest(), "right_hash": b.cls.digest(),
                                            "left_td": ta, "right_td": tb}, budget)
        cert["subadditive"] = cert["verified_td"] <= ta + tb
        stem = "union"
    elif what == "order-global":
        cls = resolve_class(args.class_opt or "warmuth")
        if args.order:
            ranks = [int(r) for r in args.order.split(",")]
        else:
            ranks = list(range(cls.m))
        sigma = order_to_global_sigma(cls, ranks)
        h0 = _hyp(cls, args.h0)
        td = td_of_sigma(cls, sigma, h0, budget=budget).value
        cert = {"construction": what, "inputs": {"ranks": ranks}, "class_hash": cls.digest(), "h0": h0,
                "verified_td": td, "property_checks": {"global": check_family(sigma, "global").holds}}
        stem = "order_global"
    else:  # search-gap
        found = find_gvs_beats_local_class()
        if found is None:
            _emit(args, {"command": "construct", "construction": what, "found": False}, ["no class within bounds"])
            return MISMATCH
        cls = found.cls
        cert = {"construction": what, "class": cls.to_hc(), "nctd": found.nctd.value, "rtd": found.rtd.value,
                "nctd_witness": _named_witness(cls, found.nctd),
                "local_td1_refuted_for_h0": [cls.hypothesis_name(h) for h in found.local_td1_refuted]}
        lines = [cls.to_hc().rstrip(), f"NCTD {found.nctd.value}, RTD {found.rtd.value}; "
                 f"no local sigma reaches TD 1 from any of {len(found.local_td1_refuted)} starting hypotheses"]
        _emit(args, cert, lines)
        return OK
    paths = _write_outputs(args, cls, sigma, cert, stem)
    lines = [f"{cert['construction']}: TD {cert['verified_td']}"]
    lines += [f"{k}: {v}" for k, v in sorted(cert["property_checks"].items())]
    for key in ("bound_holds", "subadditive"):
        if key in cert:
            lines.append(f"{key}: {cert[key]}")
    lines += [f"wrote {p}" for p in paths]
    _emit(args, {"command": "construct", "certificate": cert, "files": paths}, lines)
    return OK


def cmd_reproduce(args) -> int:
    t = args.target
    if t == "family-sizes":
        report = repro.family_sizes(args.m)
    elif t == "lower-bounds":
        report = repro.lower_bounds(args.d, budget=args.budget_nodes)
    else:
        report = repro.TARGETS[t](budget=args.budget_nodes)
    lines = [f"[{'ok' if c['ok'] else 'MISMATCH'}] {c['name']}: expected {c['expected']}, got {c['got']}"
             for c in report["checks"]]
    if "value" in report:
        lines.insert(0, f"value: {report['value']}")
    report["provenance"] = _provenance(args)
    _emit(args, report, lines)
    return OK if repro.all_ok(report) else MISMATCH


def cmd_family_size(args) -> int:
    v = count_pref_relations(args.m)
    _emit(args, {"command": "family-size", "m": args.m, "value": v}, [str(v)])
    return OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="teachdim", description="Teaching-dimension workbench")
    p.add_argument("--version", action="version", version=__version__)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "json"), default="text")
    common.add_argument("--budget-nodes", type=int, default=None,
                        help="search node budget (default: $TEACHDIM_BUDGET_NODES or built-in)")
    sub = p.add_subparsers(dest="cmd", required=True)

    c = sub.add_parser("compute", parents=[common], help="compute dimensions of a class")
    c.add_argument("measure", choices=("vcd", "wctd", "rtd", "nctd", "tdsigma", "all"))
    c.add_argument("class_path", nargs="?")
    c.add_argument("--class", dest="class_opt")
    c.add_argument("--pref")
    c.add_argument("--h0", default="0", help="hypothesis name or index, or 'all'")
    g = c.add_mutually_exclusive_group()
    g.add_argument("--include-initial-target", dest="include_initial_target", action="store_true", default=True)
    g.add_argument("--exclude-initial-target", dest="include_initial_target", action="store_false")
    c.set_defaults(func=cmd_compute)

    s = sub.add_parser("simulate", parents=[common], help="replay a teaching sequence")
    s.add_argument("--class", dest="class_opt", required=True)
    s.add_argument("--pref", required=True)
    s.add_argument("--h0", default="0")
    s.add_argument("--target", required=True)
    s.add_argument("--sequence", default="", help="e.g. 'x3:1,x4:1'; a bare instance takes the target's label")
    s.add_argument("--tie-mode", choices=TIE_MODES, default="adversarial")
    s.set_defaults(func=cmd_simulate)

    v = sub.add_parser("verify", parents=[common], help="check family membership, collusion-freeness, no-clash")
    v.add_argument("check", choices=("collusion-free", "family", "non-clashing"))
    v.add_argument("--class", dest="class_opt", required=True)
    v.add_argument("--pref")
    v.add_argument("--family", choices=CHECKABLE)
    v.add_argument("--h0", default="0")
    v.add_argument("--mapping", help="JSON {hypothesis: [[instance, label], ...]} or 'warmuth-gvs'")
    v.set_defaults(func=cmd_verify)

    k = sub.add_parser("construct", parents=[common], help="build a preference construction")
    k.add_argument("what", choices=("powerset7-local", "double", "union", "order-global", "search-gap"))
    k.add_argument("inputs", nargs="*", help=".pref inputs for double/union")
    k.add_argument("--in", dest="in_pref", help="input .pref for double")
    k.add_argument("--class", dest="class_opt")
    k.add_argument("--order", help="comma-separated ranks for order-global")
    k.add_argument("--h0", default="0")
    k.add_argument("--out", help="directory for the .hc, .pref and certificate")
    k.set_defaults(func=cmd_construct)

    r = sub.add_parser("reproduce", parents=[common], help="rerun a result and compare with expected values")
    r.add_argument("target", choices=tuple(repro.TARGETS))
    r.add_argument("--m", type=int, default=5)
    r.add_argument("--d", type=int, default=7)
    r.set_defaults(func=cmd_reproduce)

    f = sub.add_parser("family-size", parents=[common], help="number of weak orders on m hypotheses")
    f.add_argument("m", type=int)
    f.set_defaults(func=cmd_family_size)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "in_pref", None):
        args.inputs = [args.in_pref] + list(args.inputs)
    try:
        if getattr(args, "budget_nodes", None) is not None and args.budget_nodes < 1:
            raise InputError("--budget-nodes must be positive")
        return args.func(args)
    except ResourceError as e:
        print(f"error [{e.reason}]: {e}", file=sys.stderr)
        return RESOURCE
    except TeachDimError as e:
        print(f"error [{e.reason}]: {e}", file=sys.stderr)
        return BAD_INPUT
    except OSError as e:
        print(f"error [io]: {e}", file=sys.stderr)
        return BAD_INPUT


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
