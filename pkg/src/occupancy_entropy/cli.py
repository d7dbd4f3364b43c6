"""Command-line front end.

Every command is deterministic given its arguments (seeds default to a
fixed constant, never the clock) and emits machine-readable output:
JSON with sorted keys or CSV with fixed headers. Exit codes: 0 success,
2 input error, 3 resource-cap error. Schemas are documented in
docs/formats.md.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from .combinatorics import CapExceededError, OccupancyVector
from .distributions import (
    DEFAULT_SEED,
    MultinomialDist,
    MvhgDist,
    OneParticleDistribution,
    SzilardSplitDist,
    convergence_scan,
    sample,
)
from .entropy import (
    entropy_by_enumeration,
    multinomial_entropy,
    mvhg_entropy,
)
from .oracle import brute_force_mvhg, brute_force_partial_trace, mc_entropy_estimate
from .physics import BoxModel, SpectrumTruncation, ideal_gas_entropy, szilard_insertion
from .quantum import empirical_information, holevo_chi, measurement_ledger

SCHEMA_VERSION = 1

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_CAP = 3

PUBLIC_COMMANDS = (
    "entropy",
    "converge",
    "gas",
    "szilard",
    "holevo",
    "empirical-info",
    "ledger",
    "sample",
)


class InputSpecError(ValueError):
    """Malformed command input (maps to exit code 2)."""


def _load_json_arg(text: str, what: str) -> dict:
    """Accept inline JSON (starts with '{') or a path to a JSON file."""
    raw = text
    if not text.lstrip().startswith("{"):
        path = Path(text)
        if not path.is_file():
            raise InputSpecError(f"{what}: no such file {text!r}")
        raw = path.read_text()
    try:
        obj = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise InputSpecError(f"{what}: invalid JSON ({exc})") from exc
    if not isinstance(obj, dict):
        raise InputSpecError(f"{what}: expected a JSON object")
    return obj


def _check_fields(obj: dict, required: set, optional: set, what: str) -> None:
    missing = required - set(obj)
    if missing:
        raise InputSpecError(f"{what}: missing fields {sorted(missing)}")
    unknown = set(obj) - required - optional
    if unknown:
        raise InputSpecError(f"{what}: unknown fields {sorted(unknown)}")


def _int_list(text: str, what: str) -> list[int]:
    try:
        return [int(tok) for tok in text.split(",") if tok != ""]
    except ValueError as exc:
        raise InputSpecError(f"{what}: expected comma-separated integers") from exc


def _float_list(text: str, what: str) -> list[float]:
    try:
        return [float(tok) for tok in text.split(",") if tok != ""]
    except ValueError as exc:
        raise InputSpecError(f"{what}: expected comma-separated numbers") from exc


def _one_particle(probs, normalize: bool, what: str) -> OneParticleDistribution:
    arr = np.asarray(probs, dtype=np.float64)
    try:
        if normalize:
            return OneParticleDistribution.from_weights(arr)
        return OneParticleDistribution(arr)
    except ValueError as exc:
        raise InputSpecError(f"{what}: {exc}") from exc


def parse_distribution_spec(spec: dict):
    """Build a distribution from its JSON description."""
    kind = spec.get("kind")
    if kind == "multinomial":
        _check_fields(spec, {"kind", "N", "probs"}, {"normalize"}, "multinomial spec")
        p = _one_particle(spec["probs"], bool(spec.get("normalize", False)), "probs")
        return MultinomialDist(int(spec["N"]), p)
    if kind == "mvhg":
        _check_fields(spec, {"kind", "N", "urn"}, set(), "mvhg spec")
        urn = OccupancyVector(tuple(int(x) for x in spec["urn"]))
        return MvhgDist(urn, int(spec["N"]))
    if kind == "szilard":
        _check_fields(
            spec,
            {"kind", "N", "volume_fraction", "left_probs", "right_probs"},
            {"normalize"},
            "szilard spec",
        )
        norm = bool(spec.get("normalize", False))
        return SzilardSplitDist(
            int(spec["N"]),
            float(spec["volume_fraction"]),
            _one_particle(spec["left_probs"], norm, "left_probs"),
            _one_particle(spec["right_probs"], norm, "right_probs"),
        )
    raise InputSpecError(f"distribution spec: unknown kind {kind!r}")


def parse_box_model(spec: dict) -> BoxModel:
    _check_fields(spec, {"mass_kg", "temperature_K", "side_m"}, {"dims"}, "box model")
    try:
        return BoxModel(
            mass=float(spec["mass_kg"]),
            temperature=float(spec["temperature_K"]),
            side_length=float(spec["side_m"]),
            dimensions=int(spec.get("dims", 3)),
        )
    except ValueError as exc:
        raise InputSpecError(f"box model: {exc}") from exc


def _emit_json(payload: dict) -> None:
    payload = {"schema_version": SCHEMA_VERSION, **payload}
    sys.stdout.write(json.dumps(payload, sort_keys=True, indent=2) + "\n")


def _emit_csv(header: list[str], rows: list[list]) -> None:
    out = [",".join(header)]
    for row in rows:
        out.append(",".join(_csv_cell(v) for v in row))
    sys.stdout.write("\n".join(out) + "\n")


def _csv_cell(v) -> str:
    if isinstance(v, float):
        return format(v, ".12g")
    return str(v)


# --- commands -----------------------------------------------------------------


def cmd_entropy(args) -> int:
    dist = parse_distribution_spec(_load_json_arg(args.spec, "distribution spec"))
    if isinstance(dist, MultinomialDist):
        report = multinomial_entropy(dist)
    elif isinstance(dist, MvhgDist):
        report = mvhg_entropy(dist)
    else:
        total = entropy_by_enumeration(dist, cap=args.cap)
        _emit_json(
            {
                "kind": "szilard",
                "total": _convert(total, args.unit),
                "unit": args.unit,
            }
        )
        return EXIT_OK
    report = report.in_unit(args.unit)
    _emit_json({"kind": type(dist).__name__, **report.as_dict()})
    return EXIT_OK


def _convert(nats: float, unit: str) -> float:
    return nats / np.log(2) if unit == "bits" else nats


def cmd_converge(args) -> int:
    base = OccupancyVector(tuple(_int_list(args.base_urn, "--base-urn")))
    scales = _int_list(args.scales, "--scales")
    if not scales or any(s < 1 for s in scales):
        raise InputSpecError("--scales: need positive integers")
    if args.draws < 0:
        raise InputSpecError("--draws must be non-negative")
    if base.total < 1:
        raise InputSpecError("--base-urn must hold at least one particle")
    limit = MultinomialDist(
        args.draws, OneParticleDistribution.empirical_from_urn(base)
    )
    limit_entropy = multinomial_entropy(limit).total
    rows = []
    try:
        for U, tv in convergence_scan(base, args.draws, scales, cap=args.cap):
            urn = base.scaled(U // base.total)
            hyper = mvhg_entropy(MvhgDist(urn, args.draws)).total
            rows.append([U, tv, hyper, limit_entropy, limit_entropy - hyper])
    except ValueError as exc:
        # a scaled urn smaller than the draw count ends the scan as a
        # resource failure, matching the documented exit-code contract
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAP
    header = ["U", "tv", "hyper_entropy", "multinomial_entropy", "empirical_information"]
    if args.format == "json":
        _emit_json({"columns": header, "rows": rows})
    else:
        _emit_csv(header, rows)
    return EXIT_OK


def cmd_gas(args) -> int:
    model = parse_box_model(_load_json_arg(args.model, "box model"))
    trunc = SpectrumTruncation(args.tail_bound, args.max_states)
    result = ideal_gas_entropy(model, args.particles, trunc)
    gap = result.relative_gap if math.isfinite(result.relative_gap) else None
    _emit_json(
        {
            "exact": result.exact.as_dict(),
            "sackur_tetrode_kB": result.sackur_tetrode,
            "relative_gap": gap,
            "Z": result.partition_function,
            "states_retained": result.states_retained,
            "tail_bound_achieved": result.tail_bound_achieved,
        }
    )
    return EXIT_OK


def cmd_szilard(args) -> int:
    model = parse_box_model(_load_json_arg(args.model, "box model"))
    if model.dimensions != 1:
        raise InputSpecError("szilard: the box model must be 1-D")
    trunc = SpectrumTruncation(args.tail_bound, args.max_states)
    result = szilard_insertion(model, args.particles, trunc, cap=args.cap)
    _emit_json(
        {
            "S_before_kB": result.s_before,
            "S_half_kB": result.s_half_box,
            "S_after_kB": result.s_after,
            "delta_kB": result.delta,
            "Z_full": result.partition_full,
            "Z_half": result.partition_half,
            "states_full": result.states_full,
            "states_half": result.states_half,
            "tail_bound_achieved": result.tail_bound_achieved,
        }
    )
    return EXIT_OK


def cmd_holevo(args) -> int:
    probs = _float_list(args.probs, "--probs")
    p = _one_particle(probs, args.normalize, "--probs")
    if args.draws > args.universe_size:
        raise InputSpecError("--draws cannot exceed --universe-size")
    est = holevo_chi(
        args.universe_size,
        args.draws,
        p,
        mode=args.mode,
        mc_samples=args.mc_samples,
        seed=args.seed,
        cap=args.cap,
    )
    payload = {"chi": est.chi, "mode": est.mode}
    if est.standard_error is not None:
        payload["standard_error"] = est.standard_error
    _emit_json(payload)
    return EXIT_OK


def cmd_empirical_info(args) -> int:
    urn = OccupancyVector(tuple(_int_list(args.urn, "--urn")))
    if args.draws > urn.total:
        raise InputSpecError("--draws cannot exceed the urn size")
    _emit_json(
        {"empirical_information_nats": empirical_information(urn, args.draws)}
    )
    return EXIT_OK


def cmd_ledger(args) -> int:
    scenario = _load_json_arg(args.scenario, "scenario")
    _check_fields(scenario, {"start", "steps"}, set(), "scenario")
    ledger = measurement_ledger(scenario["start"], scenario["steps"])
    _emit_json(
        {
            "steps": [
                {
                    "label": s.label,
                    "pre_entropy": s.pre_entropy,
                    "post_entropy": s.post_entropy,
                    "information_gained": s.information_gained,
                }
                for s in ledger.steps
            ],
            "total_information": ledger.total_information,
        }
    )
    return EXIT_OK


def cmd_sample(args) -> int:
    dist = parse_distribution_spec(_load_json_arg(args.spec, "distribution spec"))
    draws = sample(dist, args.count, seed=args.seed)
    rows = [list(v.counts) for v in draws]
    if args.format == "csv":
        header = [f"n{i}" for i in range(dist.num_colors)]
        _emit_csv(header, rows)
    else:
        _emit_json({"seed": args.seed, "samples": rows})
    return EXIT_OK


def cmd_oracle(args) -> int:
    if args.oracle_command == "mvhg":
        urn = OccupancyVector(tuple(_int_list(args.urn, "--urn")))
        table = brute_force_mvhg(urn, args.draws, urn_cap=args.cap)
        _emit_json(
            {"pmf": {" ".join(map(str, k.counts)): str(v) for k, v in table.items()}}
        )
    elif args.oracle_command == "ptrace":
        urn = OccupancyVector(tuple(_int_list(args.urn, "--urn")))
        table = brute_force_partial_trace(urn, args.draws, microstate_cap=args.cap)
        _emit_json(
            {"pmf": {" ".join(map(str, k.counts)): str(v) for k, v in table.items()}}
        )
    elif args.oracle_command == "mc-entropy":
        dist = parse_distribution_spec(_load_json_arg(args.spec, "distribution spec"))
        est, se = mc_entropy_estimate(dist, args.samples, seed=args.seed)
        _emit_json({"entropy_estimate": est, "standard_error": se})
    else:
        raise InputSpecError("oracle: choose one of mvhg, ptrace, mc-entropy")
    return EXIT_OK


# --- parser -------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="occupancy-entropy",
        description="Exact occupancy-number distributions and entropies "
        "for bosonic systems.",
    )
    sub = parser.add_subparsers(
        dest="command", metavar="{" + ",".join(PUBLIC_COMMANDS) + "}"
    )
    sub.required = True

    def add(name, func, **kwargs):
        p = sub.add_parser(name, **kwargs)
        p.set_defaults(func=func)
        return p

    p = add("entropy", cmd_entropy, help="decomposed entropy of a distribution spec")
    p.add_argument("spec", help="inline JSON or path to a distribution spec")
    p.add_argument("--unit", choices=["nats", "bits", "kB"], default="nats")
    p.add_argument("--cap", type=int, default=10**6)

    p = add("converge", cmd_converge, help="TV distance along scaled urns")
    p.add_argument("--base-urn", required=True, help="comma-separated counts")
    p.add_argument("--draws", type=int, required=True, help="system particle count N")
    p.add_argument("--scales", required=True, help="comma-separated urn multipliers")
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.add_argument("--cap", type=int, default=10**6)

    p = add("gas", cmd_gas, help="exact ideal-gas entropy vs the closed form")
    p.add_argument("--model", required=True, help="inline JSON or path to a box model")
    p.add_argument("--particles", type=int, required=True)
    p.add_argument("--tail-bound", type=float, default=1e-14)
    p.add_argument("--max-states", type=int, default=4_000_000)

    p = add("szilard", cmd_szilard, help="piston-insertion entropy ledger")
    p.add_argument("--model", required=True, help="inline JSON or path to a box model")
    p.add_argument("--particles", type=int, default=1)
    p.add_argument("--tail-bound", type=float, default=1e-14)
    p.add_argument("--max-states", type=int, default=4_000_000)
    p.add_argument("--cap", type=int, default=10**6)

    p = add("holevo", cmd_holevo, help="Holevo bound on accessible information")
    p.add_argument("--universe-size", type=int, required=True)
    p.add_argument("--draws", type=int, required=True)
    p.add_argument("--probs", required=True, help="comma-separated probabilities")
    p.add_argument("--normalize", action="store_true")
    p.add_argument("--mode", choices=["exact", "monte_carlo"], default="exact")
    p.add_argument("--mc-samples", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--cap", type=int, default=10**6)

    p = add("empirical-info", cmd_empirical_info,
            help="entropy gap of the empirical model over the exact draw")
    p.add_argument("--urn", required=True, help="comma-separated counts")
    p.add_argument("--draws", type=int, required=True)

    p = add("ledger", cmd_ledger, help="measurement scenario entropy ledger")
    p.add_argument("scenario", help="inline JSON or path to a scenario file")

    p = add("sample", cmd_sample, help="seeded occupancy samples")
    p.add_argument("spec", help="inline JSON or path to a distribution spec")
    p.add_argument("--count", type=int, required=True)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--format", choices=["json", "csv"], default="json")

    # debugging aid, deliberately absent from the advertised command list
    p = add("oracle", cmd_oracle)
    osub = p.add_subparsers(dest="oracle_command")
    o = osub.add_parser("mvhg")
    o.add_argument("--urn", required=True)
    o.add_argument("--draws", type=int, required=True)
    o.add_argument("--cap", type=int, default=10)
    o = osub.add_parser("ptrace")
    o.add_argument("--urn", required=True)
    o.add_argument("--draws", type=int, required=True)
    o.add_argument("--cap", type=int, default=10**6)
    o = osub.add_parser("mc-entropy")
    o.add_argument("spec")
    o.add_argument("--samples", type=int, required=True)
    o.add_argument("--seed", type=int, default=DEFAULT_SEED)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors already; normalize other codes
        return EXIT_INPUT if exc.code not in (0,) else 0
    try:
        return args.func(args)
    except CapExceededError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAP
    except (InputSpecError, ValueError, KeyError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
