"""Campaign driver: cone generators against every zero-dimensional orbit.

A campaign fixes n, a generating set of divisor classes (extremal rays or
the Hilbert basis), and a multiple m, then decides one feasibility question
per (divisor, orbit type) pair: rational for the semi-ampleness reading,
integral for base-point freeness. Every feasible cell is backed by a
certificate that is re-verified — from disk when a cache directory is in
play — and every rationally infeasible cell by a multiplier witness.
Integral infeasibility has no compact witness; those cells carry an
attestation of the exhausted search, guarded by a content checksum.

Results land in a VerdictTable whose cells are canonically ordered, so the
same configuration produces the identical table at any parallelism degree.
"""

import hashlib
import json
import os
import tempfile
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

from .cones import build_fnef_cone, extremal_rays, hilbert_basis, normalize_lattice
from .divisors import (as_ca, divisor_from_text, divisor_to_json_dict,
                       divisor_to_text, is_f_nef, is_integral)
from .feasibility import (BudgetExceeded, Certificate, build_intersection_slice,
                          decide_integral, decide_rational, ilp_feasible,
                          lp_feasible, verify_payload, weighting_from_point,
                          witness_to_json_dict)
from .trees import Stratum, enumerate_fpoint_orbits, orbit_size, strata_isomorphic

MODES = ("semiample", "bpf")
GENERATOR_KINDS = ("rays", "hilbert")
CACHE_ENV = "FNEF_CACHE_DIR"


# --- configuration ----------------------------------------------------------


@dataclass(frozen=True)
class CampaignConfig:
    """Validated description of one campaign run.

    n values above max_n are refused unless allow_large is set; the solves
    are exact at any n, but their cost grows quickly, so asking for more
    is an explicit choice rather than a typo.
    """

    n: int
    mode: str
    m: int = 1
    generators: str = ""  # defaulted from mode: semiample->rays, bpf->hilbert
    jobs: int = 1
    cache_dir: str | None = None
    node_budget: int | None = None
    fast_path_budget: int = 2000  # nodes for the one-shot joint solve; 0 = off
    max_n: int = 14
    allow_large: bool = False

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        gens = self.generators or ("rays" if self.mode == "semiample" else "hilbert")
        object.__setattr__(self, "generators", gens)
        if self.generators not in GENERATOR_KINDS:
            raise ValueError(f"generators must be one of {GENERATOR_KINDS}")
        if self.n < 5:
            raise ValueError(f"need n >= 5, got {self.n}")
        if self.n > self.max_n and not self.allow_large:
            raise ValueError(
                f"n={self.n} exceeds the default ceiling {self.max_n}; "
                "pass allow_large to run it anyway")
        if self.m < 1:
            raise ValueError(f"need m >= 1, got {self.m}")
        if self.jobs < 1:
            raise ValueError(f"need jobs >= 1, got {self.jobs}")

    @property
    def kind(self) -> str:
        return "rational" if self.mode == "semiample" else "integral"


def generator_divisors(n: int, kind: str) -> list:
    """The campaign's divisor classes, canonically ordered and checked."""
    cone = build_fnef_cone(n)
    lat = normalize_lattice(n)
    if kind == "rays":
        vecs = extremal_rays(cone)
    elif kind == "hilbert":
        vecs = hilbert_basis(cone).elements
    else:
        raise ValueError(f"unknown generator kind {kind!r}")
    out = []
    for v in vecs:
        d = lat.divisor(v)
        if not is_f_nef(d) or not is_integral(d):
            raise AssertionError(f"generator {v} fails the divisor-side checks")
        out.append(d)
    return out


# --- verdict table ----------------------------------------------------------


@dataclass(frozen=True)
class CellVerdict:
    """One (divisor, orbit type) decision with its evidence reference."""

    divisor: str  # canonical text form
    shape: str  # orbit type code
    stratum: tuple  # representative family, sorted member tuples
    orbit_count: int
    kind: str  # "rational" | "integral"
    m: int
    feasible: bool
    nodes: int
    certificate: str | None  # payload file name when a cache directory is set

    def to_json_dict(self) -> dict:
        return {
            "divisor": self.divisor,
            "shape": self.shape,
            "stratum": [list(t) for t in self.stratum],
            "orbit_count": self.orbit_count,
            "kind": self.kind,
            "m": self.m,
            "feasible": self.feasible,
            "nodes": self.nodes,
            "certificate": self.certificate,
        }

    @classmethod
    def from_json_dict(cls, obj: dict) -> "CellVerdict":
        return cls(
            divisor=str(obj["divisor"]),
            shape=str(obj["shape"]),
            stratum=tuple(tuple(int(x) for x in t) for t in obj["stratum"]),
            orbit_count=int(obj["orbit_count"]),
            kind=str(obj["kind"]),
            m=int(obj["m"]),
            feasible=bool(obj["feasible"]),
            nodes=int(obj["nodes"]),
            certificate=obj.get("certificate"),
        )


@dataclass(frozen=True)
class VerdictTable:
    """All cells of one campaign, in canonical (divisor, shape) order."""

    n: int
    mode: str
    m: int
    generator_kind: str
    cells: tuple

    def rollup(self) -> dict:
        """Per-divisor verdict: feasible on every orbit type."""
        out: dict = {}
        for c in self.cells:
            out[c.divisor] = out.get(c.divisor, True) and c.feasible
        return out

    def ok(self) -> bool:
        return all(c.feasible for c in self.cells)

    def failing_divisors(self) -> list:
        return sorted(d for d, good in self.rollup().items() if not good)

    def summary_line(self) -> str:
        gen = "extremal ray" if self.generator_kind == "rays" else "Hilbert element"
        if self.mode == "semiample":
            verdict = "YES" if self.ok() else "NO"
            return (f"n={self.n}: every {gen} rationally feasible on all "
                    f"orbit types: {verdict}")
        bad = self.failing_divisors()
        return (f"n={self.n}: {gen}s integrally infeasible at m={self.m} "
                f"for some orbit type: {len(bad)}")

    def to_json_dict(self) -> dict:
        return {
            "n": self.n,
            "mode": self.mode,
            "m": self.m,
            "generator_kind": self.generator_kind,
            "cells": [c.to_json_dict() for c in self.cells],
        }

    @classmethod
    def from_json_dict(cls, obj: dict) -> "VerdictTable":
        return cls(
            n=int(obj["n"]),
            mode=str(obj["mode"]),
            m=int(obj["m"]),
            generator_kind=str(obj["generator_kind"]),
            cells=tuple(CellVerdict.from_json_dict(c) for c in obj["cells"]),
        )


def report(table: VerdictTable, fmt: str = "text") -> str:
    if fmt == "json":
        return json.dumps(table.to_json_dict(), indent=2, sort_keys=True)
    if fmt == "csv":
        lines = ["divisor,shape,kind,m,feasible,nodes,orbit_count,certificate"]
        for c in table.cells:
            cert = c.certificate or ""
            div = '"' + c.divisor.replace('"', '""') + '"'
            lines.append(f"{div},{c.shape},{c.kind},{c.m},"
                         f"{int(c.feasible)},{c.nodes},{c.orbit_count},{cert}")
        return "\n".join(lines) + "\n"
    if fmt == "text":
        lines = [table.summary_line()]
        roll = table.rollup()
        for div in sorted(roll):
            bad = [c.shape for c in table.cells
                   if c.divisor == div and not c.feasible]
            if bad:
                lines.append(f"  {div}: infeasible on {len(bad)} orbit type(s): "
                             + ", ".join(sorted(bad)))
            else:
                lines.append(f"  {div}: feasible on every orbit type")
        return "\n".join(lines) + "\n"
    raise ValueError(f"unknown format {fmt!r}")


# --- certificate cache ------------------------------------------------------


def resolve_cache_dir(explicit: str | None) -> str | None:
    if explicit:
        return explicit
    return os.environ.get(CACHE_ENV) or None


def cell_key(n: int, dtext: str, m: int, kind: str, members: tuple) -> str:
    """Stable content address of one decision problem."""
    blob = json.dumps(
        {"n": n, "divisor": dtext, "m": m, "kind": kind,
         "T": [list(t) for t in members]},
        sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()


def _record_checksum(obj: dict) -> str:
    body = {k: v for k, v in obj.items() if k != "checksum"}
    blob = json.dumps(body, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()


def _atomic_write_json(path: str, obj: dict) -> None:
    d = os.path.dirname(path) or "."
    os.makedirs(d, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=d, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            json.dump(obj, fh, indent=1, sort_keys=True)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _payload_matches(obj: dict, n: int, dtext: str, m: int, kind: str,
                     members: tuple) -> bool:
    try:
        if int(obj["n"]) != n or int(obj["m"]) != m:
            return False
        if divisor_to_text(_divisor_from_payload(obj)) != dtext:
            return False
        got = tuple(tuple(sorted(int(x) for x in t)) for t in obj["T"])
        if tuple(sorted(got)) != tuple(sorted(members)):
            return False
        pk = obj.get("kind")
        if kind == "rational":
            return pk in ("rational", "farkas")
        return pk in ("integral", "exhausted")
    except (KeyError, TypeError, ValueError):
        return False


def _divisor_from_payload(obj: dict):
    from .divisors import divisor_from_json_dict
    return as_ca(divisor_from_json_dict(obj["divisor"]))


def load_cached_cell(path: str, n: int, dtext: str, m: int, kind: str,
                     members: tuple):
    """(feasible, nodes) from a cached payload, or None when it cannot be
    trusted: unreadable, keyed to a different problem, failing re-verification
    (certificates and witnesses), or carrying a broken checksum (attestations).
    """
    try:
        with open(path) as fh:
            obj = json.load(fh)
    except (OSError, ValueError):
        return None
    if not isinstance(obj, dict) or not _payload_matches(obj, n, dtext, m, kind, members):
        return None
    pk = obj.get("kind")
    nodes = int(obj.get("stats", {}).get("nodes", 0))
    if pk == "exhausted":
        if obj.get("checksum") != _record_checksum(obj):
            return None
        return (False, nodes)
    ok, _problems = verify_payload(obj)
    if not ok:
        return None
    return (pk != "farkas", nodes)


# --- one cell ---------------------------------------------------------------


def solve_cell_payload(n: int, dtext: str, m: int, members: tuple, kind: str,
                       node_budget=None) -> dict:
    """Decide one cell and build its serializable evidence record.

    The record keeps the exact problem key (n, divisor, m, family) alongside
    the evidence, plus the node count under "stats"; attestations for
    exhausted integral searches carry a checksum instead of a proof.
    """
    d = as_ca(divisor_from_text(dtext))
    s = Stratum(n, frozenset(frozenset(t) for t in members))
    if kind == "rational":
        v = decide_rational(n, d, m, s)
        if v.feasible:
            cert = Certificate(n, m, d, s, "rational", weighting_from_point(n, v.point))
            obj = cert.to_json_dict()
            obj["stats"] = {"nodes": 0}
        else:
            obj = witness_to_json_dict(n, m, d, s, v.witness)
            obj["stats"] = {"nodes": 0}
    elif kind == "integral":
        v = decide_integral(n, d, m, s, node_budget=node_budget)
        if v.feasible:
            cert = Certificate(n, m, d, s, "integral", weighting_from_point(n, v.point))
            obj = cert.to_json_dict()
            obj["stats"] = {"nodes": v.nodes}
        else:
            if not v.exhausted:
                raise AssertionError("infeasible integral verdict without exhaustion")
            obj = {
                "kind": "exhausted",
                "n": n,
                "m": m,
                "divisor": divisor_to_json_dict(d),
                "T": [list(t) for t in s.sorted_members()],
                "stats": {"nodes": v.nodes},
            }
            obj["checksum"] = _record_checksum(obj)
    else:
        raise ValueError(f"unknown kind {kind!r}")
    if obj["kind"] != "exhausted":
        ok, problems = verify_payload(obj)
        if not ok:
            raise AssertionError(f"fresh evidence failed re-verification: {problems}")
    return obj


def _cell_worker(args):
    n, dtext, m, members, kind, node_budget = args
    obj = solve_cell_payload(n, dtext, m, members, kind, node_budget)
    feasible = obj["kind"] in ("rational", "integral")
    return (dtext, members, feasible, int(obj["stats"]["nodes"]), obj)


# --- campaigns --------------------------------------------------------------


def _fast_path_certificates(n, d, m, kind, reps, budget):
    """One joint solve whose point settles every listed cell at once.

    Returns {members: certificate payload} on success, None when the joint
    system is infeasible (which says nothing cell by cell), over budget, or
    the fast path is disabled.
    """
    if not reps:
        return None
    strata = [Stratum(n, frozenset(frozenset(t) for t in members))
              for members in reps]
    sys = build_intersection_slice(n, d, m, strata)
    if kind == "rational":
        v = lp_feasible(sys)
        if not v.feasible:
            return None
        point = v.point
    else:
        if not budget:
            return None
        try:
            v = ilp_feasible(sys, node_budget=budget, enable_cuts=False)
        except BudgetExceeded:
            return None
        if not v.feasible:
            return None
        point = v.point
    w = weighting_from_point(n, point)
    out = {}
    for members, s in zip(reps, strata):
        cert = Certificate(n, m, d, s, kind, w)
        obj = cert.to_json_dict()
        obj["stats"] = {"nodes": 0}
        ok, problems = verify_payload(obj)
        if not ok:
            raise AssertionError(f"joint point fails a member slice: {problems}")
        out[members] = obj
    return out


def run_campaign(config: CampaignConfig, divisors=None) -> VerdictTable:
    """Run every (divisor, orbit type) cell of the configured campaign.

    divisors, if given, replaces the generator enumeration (the classes are
    still checked). Cached cells are reused only when their payload
    re-verifies against the exact problem key; anything else is re-solved
    and rewritten atomically.
    """
    n, m, kind = config.n, config.m, config.kind
    cache = resolve_cache_dir(config.cache_dir)
    if divisors is None:
        divisors = generator_divisors(n, config.generators)
    else:
        divisors = [as_ca(d) for d in divisors]
        for d in divisors:
            if d.n != n:
                raise ValueError(f"divisor has n={d.n}, campaign has n={n}")
            if not is_f_nef(d):
                raise ValueError(f"divisor {divisor_to_text(d)} is not in the cone")
    orbits = enumerate_fpoint_orbits(n)
    cells: dict = {}
    pending = []

    for d in divisors:
        dtext = divisor_to_text(d)
        missing = []
        for o in orbits:
            members = tuple(o.representative.sorted_members())
            meta = (o.shape, members, o.orbit_size)
            key = cell_key(n, dtext, m, kind, members)
            path = os.path.join(cache, key + ".json") if cache else None
            if path and os.path.exists(path):
                got = load_cached_cell(path, n, dtext, m, kind, members)
                if got is not None:
                    feasible, nodes = got
                    cells[(dtext, o.shape)] = CellVerdict(
                        dtext, o.shape, members, o.orbit_size, kind, m,
                        feasible, nodes, os.path.basename(path))
                    continue
            missing.append((meta, key, path))
        if missing and config.fast_path_budget:
            reps = tuple(meta[1] for meta, _, _ in missing)
            fast = _fast_path_certificates(n, d, m, kind, reps,
                                           config.fast_path_budget)
            if fast is not None:
                for meta, key, path in missing:
                    shape, members, size = meta
                    obj = fast[members]
                    if path:
                        _atomic_write_json(path, obj)
                        got = load_cached_cell(path, n, dtext, m, kind, members)
                        if got is None:
                            raise AssertionError("stored evidence failed re-verification")
                    cells[(dtext, shape)] = CellVerdict(
                        dtext, shape, members, size, kind, m, True, 0,
                        os.path.basename(path) if path else None)
                missing = []
        for meta, key, path in missing:
            shape, members, size = meta
            pending.append((dtext, shape, members, size, key, path))

    results = {}
    work = [(n, dtext, m, members, kind, config.node_budget)
            for dtext, _shape, members, _size, _key, _path in pending]
    if config.jobs > 1 and len(work) > 1:
        with ProcessPoolExecutor(max_workers=config.jobs) as pool:
            for got in pool.map(_cell_worker, work):
                results[(got[0], got[1])] = got
    else:
        for args in work:
            got = _cell_worker(args)
            results[(got[0], got[1])] = got

    for dtext, shape, members, size, key, path in pending:
        _dt, _mem, feasible, nodes, obj = results[(dtext, members)]
        if path:
            _atomic_write_json(path, obj)
            got = load_cached_cell(path, n, dtext, m, kind, members)
            if got is None or got[0] != feasible:
                raise AssertionError("stored evidence failed re-verification")
        cells[(dtext, shape)] = CellVerdict(
            dtext, shape, members, size, kind, m, feasible, nodes,
            os.path.basename(path) if path else None)

    ordered = tuple(cells[k] for k in sorted(cells))
    return VerdictTable(n, config.mode, m, config.generators, ordered)


def run_semiample_campaign(config: CampaignConfig, divisors=None) -> VerdictTable:
    if config.mode != "semiample":
        config = replace(config, mode="semiample")
    return run_campaign(config, divisors)


def run_bpf_campaign(config: CampaignConfig, divisors=None) -> VerdictTable:
    if config.mode != "bpf":
        config = replace(config, mode="bpf")
    return run_campaign(config, divisors)


def least_feasible_multiplier(n: int, d, members_list, m_cap: int = 4,
                              node_budget=None):
    """Smallest m <= m_cap making every listed family integrally feasible,
    or None when no multiple up to the cap works. The answer is a statement
    about the scanned range only; nothing beyond m_cap is claimed."""
    d = as_ca(d)
    for m in range(1, m_cap + 1):
        good = True
        for members in members_list:
            s = Stratum(n, frozenset(frozenset(t) for t in members))
            if not decide_integral(n, d, m, s, node_budget=node_budget).feasible:
                good = False
                break
        if good:
            return m
    return None


# --- base locus -------------------------------------------------------------


@dataclass(frozen=True)
class BaseLocusComponent:
    """A family whose stratum closure obstructs every invariant multiple-m
    section, minimal under member removal (so its closure is maximal)."""

    stratum: Stratum
    orbit_count: int


def analyze_base_locus(n: int, d, m: int, kind: str = "integral",
                       node_budget=None) -> list:
    """Maximal obstructed stratum closures, one representative per orbit.

    Seeds are the zero-dimensional orbit types whose slice system has no
    solution of the requested kind. From each, members are removed one at a
    time as long as some removal stays infeasible; families keeping every
    member of an already-proven obstruction inherit its infeasibility
    without a solve (their systems contain all of its rows). A family none
    of whose single-member removals is infeasible is reported.
    """
    d = as_ca(d)
    verdicts: list = []  # (stratum, feasible) up to relabeling
    cores: list = []  # proven infeasible families, for containment pruning

    def is_infeasible(s: Stratum) -> bool:
        for t, feas in verdicts:
            if strata_isomorphic(t, s):
                return not feas
        got = None
        for core in cores:
            if core.members <= s.members:
                got = False
                break
        if got is None:
            if kind == "integral":
                got = decide_integral(n, d, m, s, node_budget=node_budget).feasible
            elif kind == "rational":
                got = decide_rational(n, d, m, s).feasible
            else:
                raise ValueError(f"unknown kind {kind!r}")
        verdicts.append((s, got))
        if not got and all(not strata_isomorphic(core, s) for core in cores):
            cores.append(s)
        return not got

    maximal: list = []
    seen: list = []

    def ascend(s: Stratum) -> None:
        for t in seen:
            if strata_isomorphic(t, s):
                return
        seen.append(s)
        worse = []
        for member in sorted(s.sorted_members(), key=lambda t: (len(t), t)):
            rest = s.members - {frozenset(member)}
            if not rest:
                continue
            child = Stratum(n, rest)
            if any(strata_isomorphic(c, child) for c in worse):
                continue
            if is_infeasible(child):
                worse.append(child)
                ascend(child)
        if not worse and not any(strata_isomorphic(x.stratum, s) for x in maximal):
            maximal.append(BaseLocusComponent(s, orbit_size(s)))

    for o in enumerate_fpoint_orbits(n):
        s = o.representative
        if is_infeasible(s):
            ascend(s)

    return sorted(maximal, key=lambda c: (len(c.stratum.members),
                                          c.orbit_count,
                                          c.stratum.sorted_members()))
