"""Command line: config ingestion, subcommand dispatch, and report rendering."""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from dataclasses import dataclass, field

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

from .building import (
    Assumptions,
    BuildingData,
    BundleSolveError,
    ValidationReport,
    solve_bundles,
    validate,
)
from .canonical import (
    CanonicalReport,
    DegenerateCanonicalError,
    QuotientCover,
    canonical_degree_report,
    quotient_cover,
)
from .fibration import elliptic_quotient_probe, restrict_to_fiber
from .groups import Character, GroupElement, Subgroup, annihilator, span
from .invariants import bmy_gate, compute_invariants, positivity_gate
from .picard import format_class, parse_class, preset
from .search import BudgetError, DEFAULT_NODE_BUDGET, SearchSpec, enumerate_covers

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_INPUT_ERROR = 2
EXIT_BUDGET = 3

BUDGET_ENV = "ABELCOV_BUDGET"


class ConfigError(ValueError):
    """Malformed or semantically invalid cover configuration."""


@dataclass
class CoverConfig:
    """Parsed cover configuration; renders back to the same TOML."""

    preset: str
    rank: int
    branch: dict[str, str]  # bit string -> class string
    bundles: dict[str, str] = field(default_factory=dict)
    assumptions: Assumptions = field(default_factory=Assumptions)
    expected: dict[str, int | str] = field(default_factory=dict)


_EXPECTED_KEYS = ("K2", "pg", "q", "chi", "twoK")
_ASSUMPTION_KEYS = ("components_smooth", "pairwise_distinct", "normal_crossings")


def parse_config(text: str) -> CoverConfig:
    """Parse a TOML cover configuration, rejecting unknown keys."""
    try:
        raw = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"TOML syntax error: {exc}") from exc

    unknown = set(raw) - {"surface", "group", "branch", "bundles", "assumptions", "expected"}
    if unknown:
        raise ConfigError(f"unknown config sections: {', '.join(sorted(unknown))}")

    surface_tbl = raw.get("surface", {})
    if set(surface_tbl) - {"preset"}:
        raise ConfigError("section [surface] admits only the key 'preset'")
    preset_name = surface_tbl.get("preset", "p1xp1")
    try:
        surf = preset(preset_name)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc

    group_tbl = raw.get("group", {})
    if set(group_tbl) - {"rank"}:
        raise ConfigError("section [group] admits only the key 'rank'")
    rank = group_tbl.get("rank")
    if not isinstance(rank, int) or not 1 <= rank <= 16:
        raise ConfigError(f"[group] rank must be an integer in 1..16, got {rank!r}")

    def read_classes(section: str) -> dict[str, str]:
        table = raw.get(section, {})
        out: dict[str, str] = {}
        for key in sorted(table):
            value = table[key]
            if len(key) != rank or any(c not in "01" for c in key):
                raise ConfigError(
                    f"[{section}] key {key!r} is not a length-{rank} bit string"
                )
            if key == "0" * rank:
                raise ConfigError(f"[{section}] key {key!r} must be nonzero")
            if not isinstance(value, str):
                raise ConfigError(f"[{section}] {key} must map to a class string")
            try:
                cls = parse_class(surf, value)
            except ValueError as exc:
                raise ConfigError(f"[{section}] {key}: {exc}") from exc
            if section == "branch" and not cls.is_effective:
                raise ConfigError(f"[branch] {key} = {value!r} is not effective")
            out[key] = value
        return out

    branch = read_classes("branch")
    bundles = read_classes("bundles")

    assumptions_tbl = raw.get("assumptions", {})
    if set(assumptions_tbl) - set(_ASSUMPTION_KEYS):
        raise ConfigError(
            f"section [assumptions] admits only: {', '.join(_ASSUMPTION_KEYS)}"
        )
    for key, value in assumptions_tbl.items():
        if not isinstance(value, bool):
            raise ConfigError(f"[assumptions] {key} must be a boolean")
    assumptions = Assumptions(**{k: bool(assumptions_tbl.get(k, False)) for k in _ASSUMPTION_KEYS})

    expected_tbl = raw.get("expected", {})
    if set(expected_tbl) - set(_EXPECTED_KEYS):
        raise ConfigError(f"section [expected] admits only: {', '.join(_EXPECTED_KEYS)}")
    expected: dict[str, int | str] = {}
    for key in sorted(expected_tbl):
        value = expected_tbl[key]
        if key == "twoK":
            if not isinstance(value, str):
                raise ConfigError("[expected] twoK must be a class string")
            parse_class(surf, value)
        elif not isinstance(value, int):
            raise ConfigError(f"[expected] {key} must be an integer")
        expected[key] = value

    return CoverConfig(
        preset=preset_name,
        rank=rank,
        branch=branch,
        bundles=bundles,
        assumptions=assumptions,
        expected=expected,
    )


def render_config(cfg: CoverConfig) -> str:
    """Serialize a config back to TOML; parse(render(cfg)) == cfg."""
    lines = ["[surface]", f'preset = "{cfg.preset}"', "", "[group]", f"rank = {cfg.rank}"]
    lines += ["", "[branch]"]
    lines += [f'{key} = "{cfg.branch[key]}"' for key in sorted(cfg.branch)]
    if cfg.bundles:
        lines += ["", "[bundles]"]
        lines += [f'{key} = "{cfg.bundles[key]}"' for key in sorted(cfg.bundles)]
    lines += ["", "[assumptions]"]
    lines += [
        f"{key} = {str(getattr(cfg.assumptions, key)).lower()}" for key in _ASSUMPTION_KEYS
    ]
    if cfg.expected:
        lines += ["", "[expected]"]
        for key in sorted(cfg.expected):
            value = cfg.expected[key]
            lines.append(f'{key} = "{value}"' if isinstance(value, str) else f"{key} = {value}")
    return "\n".join(lines) + "\n"


def config_to_data(cfg: CoverConfig) -> BuildingData:
    """Build (and, if bundles are absent, solve) the building data of a config."""
    surf = preset(cfg.preset)
    branch = {
        GroupElement.from_bits(key, cfg.rank): parse_class(surf, value)
        for key, value in cfg.branch.items()
    }
    if cfg.bundles:
        bundles = {
            Character.from_bits(key, cfg.rank): parse_class(surf, value)
            for key, value in cfg.bundles.items()
        }
        return BuildingData(surf, cfg.rank, branch, bundles, cfg.assumptions)
    try:
        bundles = solve_bundles(surf, cfg.rank, branch)
    except BundleSolveError as exc:
        raise ConfigError(f"bundles cannot be solved from the branch data: {exc}") from exc
    return BuildingData(surf, cfg.rank, branch, bundles, cfg.assumptions)


# --- report rendering ---


def _validation_lines(report: ValidationReport) -> list[str]:
    lines = ["== relation check (2L = sum of branch classes over chi(sigma) = -1) =="]
    for rel in report.relations:
        status = "ok " if rel.ok else "FAIL"
        lines.append(
            f"  [{status}] chi {rel.chi}: 2L = {format_class(rel.doubled_bundle)}"
            f" vs branch sum {format_class(rel.branch_total)}"
        )
    for sigma, cls in report.effectivity_violations:
        lines.append(f"  [FAIL] branch class at {sigma} not effective: {format_class(cls)}")
    for chi in report.triviality_violations:
        lines.append(f"  [FAIL] bundle at chi {chi} is trivial")
    for s1, s2 in report.duplicate_classes:
        lines.append(
            f"  [note] {s1} and {s2} share a class; distinctness must be arranged "
            "by the choice of members"
        )
    for s1, s2, pairing in report.forced_shared_components:
        lines.append(
            f"  [note] {s1} . {s2} = {pairing} < 0 forces a shared component"
        )
    a = report.assumptions
    lines.append(
        "  assumptions declared: smooth components="
        f"{a.components_smooth}, pairwise distinct={a.pairwise_distinct}, "
        f"normal crossings={a.normal_crossings}"
    )
    lines.append(f"  verdict: {'pass' if report.passed else 'fail'}")
    return lines


def _validation_json(report: ValidationReport) -> dict:
    return {
        "relations": [
            {
                "chi": str(rel.chi),
                "doubled_bundle": list(rel.doubled_bundle.coords),
                "branch_sum": list(rel.branch_total.coords),
                "ok": rel.ok,
            }
            for rel in report.relations
        ],
        "effectivity_violations": [
            {"sigma": str(s), "class": list(c.coords)}
            for s, c in report.effectivity_violations
        ],
        "triviality_violations": [str(chi) for chi in report.triviality_violations],
        "duplicate_classes": [[str(a), str(b)] for a, b in report.duplicate_classes],
        "assumptions": {
            k: getattr(report.assumptions, k) for k in _ASSUMPTION_KEYS
        },
        "passed": report.passed,
    }


def _invariants_lines(data: BuildingData) -> list[str]:
    inv = compute_invariants(data)
    gate = bmy_gate(inv)
    pos = positivity_gate(data)
    lines = [
        "== invariants ==",
        f'  [invariants] K2={inv.K2} pg={inv.pg} q={inv.q} chi={inv.chi} '
        f'twoK="{format_class(inv.two_K_class)}"',
        "  per-character sections of K + L:",
    ]
    for chi, h in inv.contributions:
        L = data.bundle(chi)
        lines.append(f"    chi {chi}: L = {format_class(L):8s} h0(K+L) = {h}")
    lines.append(
        f"  degree-bound chain: {gate.lower} <= K2 = {gate.K2} <= {gate.upper}"
        f" [{'pass' if gate.passed else 'FAIL'}]"
        f" (margins {gate.lower_margin}, {gate.upper_margin})"
    )
    lines.append(f"  positivity: {pos.verdict} ({pos.reason})")
    return lines


def _invariants_json(data: BuildingData) -> dict:
    inv = compute_invariants(data)
    gate = bmy_gate(inv)
    pos = positivity_gate(data)
    return {
        "K2": inv.K2,
        "pg": inv.pg,
        "q": inv.q,
        "chi": inv.chi,
        "twoK": format_class(inv.two_K_class),
        "contributions": {
            str(chi): {"L": format_class(data.bundle(chi)), "h0_K_plus_L": h}
            for chi, h in inv.contributions
        },
        "bmy": {
            "lower": gate.lower,
            "K2": gate.K2,
            "upper": gate.upper,
            "passed": gate.passed,
            "margins": [gate.lower_margin, gate.upper_margin],
        },
        "positivity": {"verdict": pos.verdict, "reason": pos.reason},
    }


def _subgroup_gens(H: Subgroup) -> list[str]:
    return [format(b, f"0{H.n}b") for b in H.basis]


def _quotient_lines(qc: QuotientCover) -> list[str]:
    lines = [
        "== quotient cover ==",
        f"  subgroup H = <{', '.join(_subgroup_gens(qc.subgroup))}>, order {qc.subgroup.order}",
        f"  quotient group rank {qc.quotient_rank} (a Z_2^{qc.quotient_rank}-cover of the base)",
    ]
    for coset, cls in qc.grouped_branch.items():
        lines.append(f"  coset {coset}: branch class {format_class(cls)}")
    for chi in qc.data.characters():
        lines.append(
            f"  quotient bundle at {chi}: {format_class(qc.data.bundle(chi))}"
        )
    if qc.absorbed:
        absorbed = ", ".join(f"{s} ({format_class(c)})" for s, c in qc.absorbed)
        lines.append(f"  absorbed ramification inside H: {absorbed}")
    if qc.node_count is not None:
        lines.append(f"  double-cover nodes from transverse branch crossings: {qc.node_count}")
    return lines


def _quotient_json(qc: QuotientCover) -> dict:
    return {
        "subgroup": _subgroup_gens(qc.subgroup),
        "subgroup_order": qc.subgroup.order,
        "quotient_rank": qc.quotient_rank,
        "grouped_branch": {str(k): format_class(v) for k, v in qc.grouped_branch.items()},
        "bundles": {
            str(chi): format_class(qc.data.bundle(chi)) for chi in qc.data.characters()
        },
        "absorbed": [[str(s), format_class(c)] for s, c in qc.absorbed],
        "node_count": qc.node_count,
    }


def _canonical_lines(report: CanonicalReport) -> list[str]:
    lines = ["== canonical map =="]
    contributing = ", ".join(f"chi {chi} -> {h}" for chi, h in report.contributing)
    lines.append(f"  contributing characters: {contributing or 'none'} (pg = {report.pg})")
    lines.append(
        f"  trivially acting subgroup H = <{', '.join(_subgroup_gens(report.H))}>,"
        f" order {report.H.order}"
    )
    lines.append(f"  H-perp = <{', '.join(_subgroup_gens(report.H_perp))}>")
    if report.quotient is not None:
        qc = report.quotient
        branch = ", ".join(
            f"{coset} -> {format_class(cls)}" for coset, cls in qc.grouped_branch.items()
        )
        lines.append(
            f"  factors through the rank-{qc.quotient_rank} quotient cover"
            f" branched on {branch}"
        )
    if report.base_system is not None:
        lines.append(
            f"  base system K + L = {format_class(report.base_system)}:"
            f" image in P^{report.image_dimension},"
            f" self-intersection {report.image_self_intersection},"
            f" base map degree {report.base_map_degree}"
        )
    lines.append(
        f"  canonical degree: {report.canonical_degree if report.canonical_degree else 'undetermined'}"
    )
    lines.append(f"  base point freeness: {report.base_point_free}")
    for note in report.notes:
        lines.append(f"  [note] {note}")
    return lines


def _canonical_json(report: CanonicalReport) -> dict:
    return {
        "contributing": {str(chi): h for chi, h in report.contributing},
        "pg": report.pg,
        "H": _subgroup_gens(report.H),
        "H_order": report.H.order,
        "H_perp": _subgroup_gens(report.H_perp),
        "quotient": _quotient_json(report.quotient) if report.quotient else None,
        "canonical_degree": report.canonical_degree,
        "base_map_degree": report.base_map_degree,
        "base_system": format_class(report.base_system) if report.base_system else None,
        "image_dimension": report.image_dimension,
        "image_self_intersection": report.image_self_intersection,
        "base_point_free": report.base_point_free,
        "notes": list(report.notes),
    }


def _fibers_lines(data: BuildingData) -> list[str]:
    lines = ["== ruling fibers =="]
    surf = data.surface
    for label, coords in zip(surf.basis_labels, ((1, 0), (0, 1))):
        ruling = surf.divisor(*coords)
        r = restrict_to_fiber(data, ruling)
        lines.append(f"  ruling |{label}|:")
        for sigma, pts in sorted(r.counts.items(), key=lambda kv: kv[0].mask):
            cls = data.branch_class(sigma)
            lines.append(f"    {sigma}: class {format_class(cls)}, {pts} point(s) on the fiber")
        lines.append(
            f"    inertia span order {r.inertia_span.order}"
            f" = <{', '.join(_subgroup_gens(r.inertia_span))}>;"
            f" {r.components} component(s) of genus {r.genus}"
        )
    lines.append("  index-2 quotient probes:")
    found = False
    for chi_mask in range(1, 1 << data.n):
        chi = Character(chi_mask, data.n)
        H = annihilator(span([chi], rank=data.n))
        probe = elliptic_quotient_probe(data, H)
        if probe.is_product:
            found = True
            lines.append(
                f"    H = ker(chi {chi}) = <{', '.join(_subgroup_gens(H))}>:"
                f" {probe.verdict}, branch {format_class(probe.branch_class)}"
                f" at {probe.branch_points} fiber(s)"
            )
    if not found:
        lines.append("    no ruling-branched product quotient found")
    return lines


def _fibers_json(data: BuildingData) -> dict:
    surf = data.surface
    out: dict = {"rulings": {}, "probes": []}
    for label, coords in zip(surf.basis_labels, ((1, 0), (0, 1))):
        r = restrict_to_fiber(data, surf.divisor(*coords))
        out["rulings"][label] = {
            "counts": {str(s): p for s, p in sorted(r.counts.items(), key=lambda kv: kv[0].mask)},
            "inertia_span": _subgroup_gens(r.inertia_span),
            "inertia_order": r.inertia_span.order,
            "components": r.components,
            "genus": r.genus,
        }
    for chi_mask in range(1, 1 << data.n):
        chi = Character(chi_mask, data.n)
        H = annihilator(span([chi], rank=data.n))
        probe = elliptic_quotient_probe(data, H)
        if probe.is_product:
            out["probes"].append(
                {
                    "chi": str(chi),
                    "H": _subgroup_gens(H),
                    "branch": format_class(probe.branch_class),
                    "branch_points": probe.branch_points,
                    "curve_genus": probe.curve_genus,
                }
            )
    return out


def _check_expected(data: BuildingData, expected: dict) -> list[str]:
    """Mismatch messages between computed invariants and the expected block."""
    if not expected:
        return []
    inv = compute_invariants(data)
    got = {"K2": inv.K2, "pg": inv.pg, "q": inv.q, "chi": inv.chi}
    errors = []
    for key, want in expected.items():
        if key == "twoK":
            actual = format_class(inv.two_K_class)
            want_cls = parse_class(data.surface, str(want))
            if inv.two_K_class != want_cls:
                errors.append(f"expected twoK = {want}, computed {actual}")
        elif got[key] != want:
            errors.append(f"expected {key} = {want}, computed {got[key]}")
    return errors


# --- subcommands ---


def _load(path: str) -> tuple[CoverConfig, BuildingData]:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    cfg = parse_config(text)
    return cfg, config_to_data(cfg)


def _cmd_verify(args) -> int:
    cfg, data = _load(args.config)
    report = validate(data)
    if args.json:
        print(json.dumps(_validation_json(report), indent=2, sort_keys=True))
    else:
        print("\n".join(_validation_lines(report)))
    return EXIT_OK if report.passed else EXIT_CHECK_FAILED


def _cmd_invariants(args) -> int:
    cfg, data = _load(args.config)
    report = validate(data)
    if not report.passed:
        print("building data invalid; run `verify` for details", file=sys.stderr)
        return EXIT_CHECK_FAILED
    if args.json:
        print(json.dumps(_invariants_json(data), indent=2, sort_keys=True))
    else:
        print("\n".join(_invariants_lines(data)))
    mismatches = _check_expected(data, cfg.expected)
    for msg in mismatches:
        print(f"expected-value mismatch: {msg}", file=sys.stderr)
    return EXIT_CHECK_FAILED if mismatches else EXIT_OK


def _cmd_canonical(args) -> int:
    cfg, data = _load(args.config)
    try:
        report = canonical_degree_report(data)
    except DegenerateCanonicalError as exc:
        print(f"degenerate canonical map: {exc}", file=sys.stderr)
        return EXIT_CHECK_FAILED
    if args.json:
        print(json.dumps(_canonical_json(report), indent=2, sort_keys=True))
    else:
        print("\n".join(_canonical_lines(report)))
    return EXIT_OK


def _cmd_fibers(args) -> int:
    cfg, data = _load(args.config)
    if args.json:
        print(json.dumps(_fibers_json(data), indent=2, sort_keys=True))
    else:
        print("\n".join(_fibers_lines(data)))
    return EXIT_OK


def _cmd_quotient(args) -> int:
    cfg, data = _load(args.config)
    try:
        gens = [GroupElement.from_bits(b.strip(), cfg.rank) for b in args.subgroup.split(",")]
    except ValueError as exc:
        raise ConfigError(f"bad --subgroup: {exc}") from exc
    H = span(gens)
    try:
        qc = quotient_cover(data, H)
    except ValueError as exc:
        raise ConfigError(f"quotient not available: {exc}") from exc
    if args.json:
        print(json.dumps(_quotient_json(qc), indent=2, sort_keys=True))
    else:
        print("\n".join(_quotient_lines(qc)))
    return EXIT_OK


def _cmd_report(args) -> int:
    cfg, data = _load(args.config)
    report = validate(data)
    failures = 0

    if args.json:
        blob: dict = {"validation": _validation_json(report)}
        if report.passed:
            blob["invariants"] = _invariants_json(data)
            try:
                canonical = canonical_degree_report(data)
                blob["canonical"] = _canonical_json(canonical)
                blob["quotient"] = (
                    _quotient_json(canonical.quotient) if canonical.quotient else None
                )
            except DegenerateCanonicalError as exc:
                blob["canonical"] = {"degenerate": str(exc)}
                blob["quotient"] = None
            blob["fibers"] = _fibers_json(data)
            mismatches = _check_expected(data, cfg.expected)
            blob["expected_mismatches"] = mismatches
            failures = len(mismatches)
        print(json.dumps(blob, indent=2, sort_keys=True))
        return EXIT_OK if report.passed and not failures else EXIT_CHECK_FAILED

    lines = _validation_lines(report)
    if report.passed:
        lines += _invariants_lines(data)
        canonical = None
        try:
            canonical = canonical_degree_report(data)
            lines += _canonical_lines(canonical)
            if canonical.quotient is not None:
                lines += _quotient_lines(canonical.quotient)
        except DegenerateCanonicalError as exc:
            lines.append(f"== canonical map ==\n  degenerate: {exc}")
        lines += _fibers_lines(data)
        mismatches = _check_expected(data, cfg.expected)
        for msg in mismatches:
            lines.append(f"expected-value mismatch: {msg}")
            failures += 1
        if canonical is not None and canonical.canonical_degree is not None:
            lines.append(
                f"canonical map: degree {canonical.canonical_degree} "
                f"Z2^{data.n}-cover of {'P1xP1' if data.surface.name == 'p1xp1' else data.surface.name}"
            )
        else:
            lines.append("canonical map: degree undetermined")
    print("\n".join(lines))
    return EXIT_OK if report.passed and not failures else EXIT_CHECK_FAILED


def _parse_target(text: str | None) -> dict:
    """Parse "K2=32,pg=4,q=1" (values may be ranges like 30..40)."""
    out: dict = {}
    if not text:
        return out
    for item in text.split(","):
        item = item.strip()
        if not item:
            continue
        if "=" not in item:
            raise ConfigError(f"bad target item {item!r}; expected key=value")
        key, _, value = item.partition("=")
        key = key.strip()
        if key not in ("K2", "pg", "q", "chi"):
            raise ConfigError(f"unknown target key {key!r} (use K2, pg, q, chi)")
        value = value.strip()
        try:
            if ".." in value:
                lo, _, hi = value.partition("..")
                parsed: int | tuple[int, int] = (int(lo), int(hi))
            else:
                parsed = int(value)
        except ValueError as exc:
            raise ConfigError(f"bad target value {value!r}") from exc
        out[key.lower() if key != "K2" else "k2"] = parsed
    return out


def _result_json(result) -> dict:
    inv = result.invariants
    record = {
        "branch": {
            str(sigma): format_class(cls) for sigma, cls in result.data.nonzero_branch()
        },
        "orbit_size": result.orbit_size,
        "invariants": {
            "K2": inv.K2,
            "pg": inv.pg,
            "q": inv.q,
            "chi": inv.chi,
            "twoK": format_class(inv.two_K_class),
        },
    }
    if result.canonical is not None:
        record["canonical"] = {
            "contributing": {str(c): h for c, h in result.canonical.contributing},
            "H": _subgroup_gens(result.canonical.H),
            "degree": result.canonical.canonical_degree,
        }
    else:
        record["canonical"] = None
    return record


def _cmd_search(args) -> int:
    target = _parse_target(args.target)
    budget = args.budget
    if budget is None:
        env = os.environ.get(BUDGET_ENV)
        budget = int(env) if env else DEFAULT_NODE_BUDGET
    try:
        spec = SearchSpec.build(
            rank=args.rank,
            classes=[c.strip() for c in args.classes.split(",")],
            single_contributing=args.single_contributing,
            canonical_degree=args.canonical_degree,
            symmetry_reduction=not args.no_symmetry,
            node_budget=budget,
            **target,
        )
    except BudgetError:
        raise
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc

    start = time.perf_counter()
    results = enumerate_covers(spec, jobs=args.jobs)
    elapsed = time.perf_counter() - start

    lines = [json.dumps(_result_json(r), sort_keys=True) for r in results]
    payload = "".join(line + "\n" for line in lines)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(payload)
    else:
        sys.stdout.write(payload)
    print(
        f"search: {len(results)} result(s), rank {args.rank}, "
        f"{args.jobs} worker(s), {elapsed:.2f}s",
        file=sys.stderr,
    )
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="abelcov",
        description="Exact arithmetic for exponent-2 abelian covers of surfaces "
        "with free Picard lattice.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_config_cmd(name: str, func, help_text: str):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("config", help="cover configuration (TOML)")
        p.add_argument("--json", action="store_true", help="machine-readable output")
        p.set_defaults(func=func)
        return p

    add_config_cmd("verify", _cmd_verify, "check the building-data relations")
    add_config_cmd("invariants", _cmd_invariants, "compute K2, pg, q, chi")
    add_config_cmd("canonical", _cmd_canonical, "analyze the canonical map")
    add_config_cmd("fibers", _cmd_fibers, "ruling restrictions and product probes")
    quotient = add_config_cmd("quotient", _cmd_quotient, "quotient cover by a subgroup")
    quotient.add_argument(
        "--subgroup",
        required=True,
        help='comma-separated generator bit strings, e.g. "0001,0010,1100"',
    )
    add_config_cmd("report", _cmd_report, "full narrative report")

    search = sub.add_parser("search", help="enumerate branch assignments on the quadric")
    search.add_argument("--rank", type=int, required=True)
    search.add_argument("--classes", required=True, help='e.g. "0,F,2F,G,2G"')
    search.add_argument("--target", help='e.g. "K2=32,pg=4,q=1" (ranges: K2=30..40)')
    search.add_argument("--single-contributing", action="store_true")
    search.add_argument("--canonical-degree", type=int, default=None)
    search.add_argument("--jobs", type=int, default=1)
    search.add_argument("--no-symmetry", action="store_true")
    search.add_argument("--budget", type=int, default=None, help=f"node budget (env {BUDGET_ENV})")
    search.add_argument("--out", help="write results (JSON lines) to this file")
    search.set_defaults(func=_cmd_search)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    except BudgetError as exc:
        print(f"budget refusal: {exc}", file=sys.stderr)
        return EXIT_BUDGET


if __name__ == "__main__":
    raise SystemExit(main())
