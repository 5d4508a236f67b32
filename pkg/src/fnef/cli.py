"""Command-line front end.

Exit codes: 0 when the command ran and its assertion holds (a feasible
check, a verifying payload, an all-feasible campaign, a completed report);
1 when the computation finished but the assertion fails (infeasible check,
payload that does not verify, campaign with failing cells); 2 for unusable
input or configuration.
"""

import argparse
import json
import os
import sys
from dataclasses import replace

from . import pipeline
from .cones import (build_fnef_cone, cone_to_json_dict, extremal_rays,
                    hilbert_basis, hilbert_to_json_dict, normalize_lattice)
from .divisors import (as_ca, divisor_from_json_dict, divisor_from_text,
                       divisor_to_text, is_f_nef)
from .feasibility import decide_integral, decide_rational, verify_payload
from .trees import Stratum, enumerate_fpoint_orbits

DEFAULT_MAX_N = 14


class SystemExit2(Exception):
    """Input or configuration problem; maps to exit code 2."""


def _check_n(args) -> None:
    if args.n < 5:
        raise SystemExit2(f"need n >= 5, got {args.n}")
    cap = args.max_n if getattr(args, "allow_large", False) else DEFAULT_MAX_N
    if args.n > cap:
        raise SystemExit2(
            f"n={args.n} exceeds the ceiling {cap}; pass --allow-large "
            "(optionally with --max-n) to run it anyway")


def _load_divisor(path: str):
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as e:
        raise SystemExit2(f"cannot read divisor file {path}: {e}")
    text = text.strip()
    if not text:
        raise SystemExit2(f"divisor file {path} is empty")
    try:
        if text.startswith("{"):
            return as_ca(divisor_from_json_dict(json.loads(text)))
        return as_ca(divisor_from_text(text.splitlines()[0]))
    except (ValueError, KeyError, TypeError) as e:
        raise SystemExit2(f"cannot parse divisor file {path}: {e}")


def _load_stratum(path: str, n: int) -> Stratum:
    try:
        with open(path) as fh:
            obj = json.load(fh)
    except (OSError, ValueError) as e:
        raise SystemExit2(f"cannot read stratum file {path}: {e}")
    if isinstance(obj, dict) and "T" in obj:
        obj = obj["T"]
    try:
        return Stratum(n, frozenset(frozenset(int(x) for x in t) for t in obj))
    except (ValueError, TypeError) as e:
        raise SystemExit2(f"stratum file {path} does not describe a family: {e}")


def _cmd_rays(args) -> int:
    _check_n(args)
    if args.json:
        print(json.dumps(cone_to_json_dict(args.n), indent=2, sort_keys=True))
        return 0
    cone = build_fnef_cone(args.n)
    lat = normalize_lattice(args.n)
    rays = extremal_rays(cone)
    print(f"n={args.n}: dim={cone.dim}, {len(cone.facets)} facet rows, "
          f"{len(rays)} extremal rays")
    for r in rays:
        print(f"  {r}  ->  {divisor_to_text(lat.divisor(r))}")
    return 0


def _cmd_hilbert(args) -> int:
    _check_n(args)
    cone = build_fnef_cone(args.n)
    basis = hilbert_basis(cone)
    if args.json:
        print(json.dumps(hilbert_to_json_dict(args.n, basis), indent=2,
                         sort_keys=True))
        return 0
    lat = normalize_lattice(args.n)
    rays = set(extremal_rays(cone))
    print(f"n={args.n}: {len(basis.elements)} Hilbert basis elements "
          f"({len(rays)} of them extremal rays)")
    for v in basis.elements:
        mark = "ray" if v in rays else "   "
        print(f"  {mark} {v}  ->  {divisor_to_text(lat.divisor(v))}")
    return 0


def _cmd_fpoints(args) -> int:
    _check_n(args)
    orbits = enumerate_fpoint_orbits(args.n)
    if args.json:
        out = [{"shape": o.shape, "orbit_size": o.orbit_size,
                "T": [list(t) for t in o.representative.sorted_members()]}
               for o in orbits]
        print(json.dumps({"n": args.n, "orbits": out}, indent=2))
        return 0
    total = sum(o.orbit_size for o in orbits)
    print(f"n={args.n}: {len(orbits)} orbit types, {total} zero-dimensional "
          "strata in total")
    for o in orbits:
        members = " ".join("{" + ",".join(map(str, t)) + "}"
                           for t in o.representative.sorted_members())
        print(f"  {o.shape}  size={o.orbit_size}  {members}")
    return 0


def _cmd_check(args) -> int:
    _check_n(args)
    d = _load_divisor(args.divisor)
    if d.n != args.n:
        raise SystemExit2(f"divisor is for n={d.n}, command says n={args.n}")
    if not is_f_nef(d):
        raise SystemExit2(f"divisor {divisor_to_text(d)} pairs negatively "
                          "with a partition curve; the slice systems assume "
                          "it does not")
    kind = args.kind
    if args.stratum:
        strata = [(None, _load_stratum(args.stratum, args.n))]
    else:
        strata = [(o.shape, o.representative)
                  for o in enumerate_fpoint_orbits(args.n)]
    all_ok = True
    for shape, s in strata:
        if kind == "rational":
            v = decide_rational(args.n, d, args.m, s)
            extra = ""
        else:
            v = decide_integral(args.n, d, args.m, s,
                                node_budget=args.node_budget)
            extra = f" nodes={v.nodes}"
        label = shape or "{" + "; ".join(",".join(map(str, t))
                                         for t in s.sorted_members()) + "}"
        word = "feasible" if v.feasible else "infeasible"
        print(f"{label}: {kind} m={args.m} {word}{extra}")
        all_ok = all_ok and v.feasible
    return 0 if all_ok else 1


def _cmd_campaign(args) -> int:
    _check_n(args)
    try:
        cfg = pipeline.CampaignConfig(
            n=args.n, mode=args.mode, m=args.m, generators=args.generators or "",
            jobs=args.jobs, cache_dir=args.cache, node_budget=args.node_budget,
            fast_path_budget=args.fast_path_budget, max_n=args.max_n,
            allow_large=args.allow_large)
    except ValueError as e:
        raise SystemExit2(str(e))
    if args.out and not pipeline.resolve_cache_dir(cfg.cache_dir):
        cfg = replace(cfg, cache_dir=os.path.join(args.out, "certs"))
    table = pipeline.run_campaign(cfg)
    text = pipeline.report(table, args.format)
    print(text, end="" if text.endswith("\n") else "\n")
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        for fmt, ext in (("text", "txt"), ("csv", "csv"), ("json", "json")):
            with open(os.path.join(args.out, f"report.{ext}"), "w") as fh:
                fh.write(pipeline.report(table, fmt))
        with open(os.path.join(args.out, "table.json"), "w") as fh:
            json.dump(table.to_json_dict(), fh, indent=1, sort_keys=True)
    return 0 if table.ok() else 1


def _cmd_verify(args) -> int:
    try:
        with open(args.file) as fh:
            obj = json.load(fh)
    except (OSError, ValueError) as e:
        raise SystemExit2(f"cannot read payload {args.file}: {e}")
    if not isinstance(obj, dict):
        raise SystemExit2(f"payload {args.file} is not an object")
    if obj.get("kind") == "exhausted":
        ok = pipeline._record_checksum(obj) == obj.get("checksum")
        if ok:
            print(f"{args.file}: attestation of an exhausted integral search "
                  "(no independent proof); checksum intact")
            return 0
        print(f"{args.file}: attestation checksum does not match")
        return 1
    ok, problems = verify_payload(obj)
    if ok:
        print(f"{args.file}: verifies ({obj.get('kind')})")
        return 0
    print(f"{args.file}: FAILS verification")
    for p in problems[:20]:
        print(f"  {p}")
    if len(problems) > 20:
        print(f"  ... and {len(problems) - 20} more")
    return 1


def _cmd_baselocus(args) -> int:
    _check_n(args)
    d = _load_divisor(args.divisor)
    if d.n != args.n:
        raise SystemExit2(f"divisor is for n={d.n}, command says n={args.n}")
    comps = pipeline.analyze_base_locus(args.n, d, args.m, kind=args.kind,
                                        node_budget=args.node_budget)
    if args.json:
        out = [{"T": [list(t) for t in c.stratum.sorted_members()],
                "orbit_size": c.orbit_count} for c in comps]
        print(json.dumps({"n": args.n, "divisor": divisor_to_text(d),
                          "m": args.m, "kind": args.kind,
                          "components": out}, indent=2))
        return 0
    if not comps:
        print(f"{divisor_to_text(d)} at m={args.m}: no obstructed strata")
        return 0
    print(f"{divisor_to_text(d)} at m={args.m}: {len(comps)} maximal "
          "obstructed stratum closure(s) up to relabeling")
    for c in comps:
        members = " ".join("{" + ",".join(map(str, t)) + "}"
                           for t in c.stratum.sorted_members())
        print(f"  orbit_size={c.orbit_count}  {members}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="fnef",
        description="Exact feasibility checks for symmetric divisor classes "
                    "against boundary stratum systems.")
    sub = ap.add_subparsers(dest="command", required=True)

    def add_n(p):
        p.add_argument("--n", type=int, required=True, help="number of markings")
        p.add_argument("--allow-large", action="store_true",
                       help=f"permit n beyond the default ceiling {DEFAULT_MAX_N}")
        p.add_argument("--max-n", type=int, default=10**9,
                       help="ceiling applied when --allow-large is set")

    p = sub.add_parser("rays", help="cone facets and extremal rays")
    add_n(p)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=_cmd_rays)

    p = sub.add_parser("hilbert", help="Hilbert basis of the cone's lattice points")
    add_n(p)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=_cmd_hilbert)

    p = sub.add_parser("fpoints", help="zero-dimensional boundary orbit types")
    add_n(p)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=_cmd_fpoints)

    p = sub.add_parser("check", help="decide one divisor against strata")
    add_n(p)
    p.add_argument("--divisor", required=True, help="divisor file (text or JSON)")
    p.add_argument("--m", type=int, default=1, help="multiple (default 1)")
    p.add_argument("--stratum", help="JSON family file; default: every orbit type")
    p.add_argument("--kind", choices=("rational", "integral"), default="integral")
    p.add_argument("--node-budget", type=int, default=None)
    p.set_defaults(func=_cmd_check)

    p = sub.add_parser("campaign", help="full generator-by-orbit verdict table")
    add_n(p)
    p.add_argument("--mode", choices=pipeline.MODES, required=True)
    p.add_argument("--m", type=int, default=1)
    p.add_argument("--generators", choices=pipeline.GENERATOR_KINDS, default=None,
                   help="default: rays for semiample, hilbert for bpf")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--cache", default=None,
                   help=f"certificate directory (default ${pipeline.CACHE_ENV})")
    p.add_argument("--out", default=None, help="directory for report files")
    p.add_argument("--format", choices=("text", "csv", "json"), default="text")
    p.add_argument("--node-budget", type=int, default=None)
    p.add_argument("--fast-path-budget", type=int, default=2000,
                   help="node cap for the one-shot joint solve; 0 disables")
    p.set_defaults(func=_cmd_campaign)

    p = sub.add_parser("verify", help="re-check a stored certificate or witness")
    p.add_argument("file")
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("baselocus", help="maximal obstructed stratum closures")
    add_n(p)
    p.add_argument("--divisor", required=True)
    p.add_argument("--m", type=int, default=1)
    p.add_argument("--kind", choices=("rational", "integral"), default="integral")
    p.add_argument("--node-budget", type=int, default=None)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=_cmd_baselocus)

    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except SystemExit2 as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
