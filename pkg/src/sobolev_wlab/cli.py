"""Command-line surface.

Commands: norm, approx, verify <statement-id>, sweep, catalog list.
Precedence: CLI flags > config file keys > built-in defaults.  The config
file is flat UTF-8 ``key = value`` lines with ``#`` comments; lists are
comma-separated.  SOBOLEV_WLAB_SEED overrides any configured seed.

Exit codes: 0 pass, 1 verdict failure, 2 usage or range error, 3 I/O error.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import dataclass

import numpy as np

from .errors import (
    DegenerateDenominator,
    IoError,
    NonNormalizableDensity,
    OracleUnavailable,
    ParameterOutOfRange,
    QuadratureFailure,
    RangeViolation,
    UnknownCatalogId,
    UsageError,
)
from .fields import (
    _CATALOG_IDS,
    default_cutoff,
    default_mollifier,
    field_from_spec,
    hat_1d_field,
    lift_difference_quotient,
    make_field,
    polynomial_tail_field,
    smooth_bump_field,
    subtract,
)
from .norms import norm_full
from .params import WeightKind, validate_general_weights, validate_params
from .quadrature import METHOD_MONTE_CARLO, METHOD_TENSOR_ORACLE, QuadratureSpec
from .reporting import make_record, write_outputs
from .smoothing import pipeline_rho
from .verification import (
    check_averaged_weight_bound,
    check_commutation_identity,
    check_finiteness_smooth,
    check_maximal_bound,
    check_sobolev_inequality,
    check_star_convolution_bound,
    run_clipping_convergence,
    run_density_experiment,
    run_mollification_convergence,
    run_truncation_convergence,
)

STATEMENT_IDS = (
    "lemma-2.1",
    "lemma-3.1",
    "prop-4.1",
    "prop-4.2",
    "lemma-4.3",
    "prop-4.4",
    "prop-4.5",
    "lemma-5.1",
    "eq-6.4",
    "lemma-6.1",
    "theorem-1.1",
    "sobolev-ineq",
)

PASS_VERDICTS = {"BoundedStable", "Decreasing", "Success", "Pass", "AllStable"}

_DEFAULTS = {
    "field": "smooth_bump(R=1)",
    "n": 1,
    "s": 0.3,
    "p": 2.0,
    "a": 0.1,
    "method": METHOD_MONTE_CARLO,
    "samples": 64000,
    "grid_points": 4096,
    "seed": 0,
    "outer_radius": None,
    "j": 1.0,
    "eps": 0.1,
    "conv_grid": 128,
    "trials": 2000,
    "delta_frac": 0.2,
    "ladder": None,
    "reversed_ladder": False,
    "param": None,
    "values": None,
    "out": "results",
    "format": "json",
}

_LIST_KEYS = {"ladder", "values", "format"}
_INT_KEYS = {"n", "samples", "grid_points", "seed", "conv_grid", "trials"}
_FLOAT_KEYS = {"s", "p", "a", "j", "eps", "delta_frac", "outer_radius"}
_BOOL_KEYS = {"reversed_ladder"}


@dataclass(frozen=True)
class RunConfig:
    command: str
    statement_id: str
    options: dict


def _coerce(key: str, raw):
    if raw is None or not isinstance(raw, str):
        return raw
    if key in _LIST_KEYS:
        return [part.strip() for part in raw.split(",") if part.strip()]
    if key in _INT_KEYS:
        return int(raw)
    if key in _FLOAT_KEYS:
        return float(raw)
    if key in _BOOL_KEYS:
        return raw.strip().lower() in ("1", "true", "yes")
    return raw


def read_config_file(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise IoError(f"cannot read config file {path}: {exc}") from exc
    out = {}
    for i, line in enumerate(lines, start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise UsageError(f"{path}:{i}: expected 'key = value', got {stripped!r}")
        key, value = (part.strip() for part in stripped.split("=", 1))
        if key not in _DEFAULTS:
            raise UsageError(f"{path}:{i}: unknown config key {key!r}")
        out[key] = _coerce(key, value)
    return out


def _build_parser() -> argparse.ArgumentParser:
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("--config", default=None)
    shared.add_argument("--field", default=None)
    shared.add_argument("--n", type=int, default=None)
    shared.add_argument("--s", type=float, default=None)
    shared.add_argument("--p", type=float, default=None)
    shared.add_argument("--a", type=float, default=None)
    shared.add_argument("--method", choices=(METHOD_MONTE_CARLO, METHOD_TENSOR_ORACLE), default=None)
    shared.add_argument("--samples", type=int, default=None)
    shared.add_argument("--grid-points", dest="grid_points", type=int, default=None)
    shared.add_argument("--seed", type=int, default=None)
    shared.add_argument("--outer-radius", dest="outer_radius", type=float, default=None)
    shared.add_argument("--j", type=float, default=None)
    shared.add_argument("--eps", type=float, default=None)
    shared.add_argument("--conv-grid", dest="conv_grid", type=int, default=None)
    shared.add_argument("--trials", type=int, default=None)
    shared.add_argument("--delta-frac", dest="delta_frac", type=float, default=None)
    shared.add_argument("--ladder", default=None)
    shared.add_argument("--reversed-ladder", dest="reversed_ladder", action="store_const", const=True, default=None)
    shared.add_argument("--out", default=None)
    shared.add_argument("--format", default=None)

    parser = argparse.ArgumentParser(prog="sobolev-wlab", description=__doc__)
    sub = parser.add_subparsers(dest="command")
    sub.add_parser("norm", parents=[shared])
    sub.add_parser("approx", parents=[shared])
    pv = sub.add_parser("verify", parents=[shared])
    pv.add_argument("statement_id", choices=STATEMENT_IDS)
    ps = sub.add_parser("sweep", parents=[shared])
    ps.add_argument("--param", default=None)
    ps.add_argument("--values", default=None)
    pc = sub.add_parser("catalog", parents=[shared])
    pc.add_argument("action", choices=("list",))
    return parser


def parse_config(argv) -> RunConfig:
    parser = _build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        raise UsageError("invalid command line") from exc
    if ns.command is None:
        raise UsageError("missing command (norm | approx | verify | sweep | catalog)")

    options = dict(_DEFAULTS)
    if getattr(ns, "config", None):
        options.update(read_config_file(ns.config))
    for key in _DEFAULTS:
        flag_val = getattr(ns, key, None)
        if flag_val is not None:
            options[key] = _coerce(key, flag_val)
    env_seed = os.environ.get("SOBOLEV_WLAB_SEED")
    if env_seed is not None:
        try:
            options["seed"] = int(env_seed)
        except ValueError as exc:
            raise UsageError(f"SOBOLEV_WLAB_SEED must be an integer, got {env_seed!r}") from exc

    if ns.command == "sweep":
        if not options.get("param") or not options.get("values"):
            raise UsageError("sweep needs --param and --values")
        if options["param"] not in ("n", "s", "p", "a", "seed", "samples"):
            raise UsageError(f"cannot sweep over {options['param']!r}")
    statement_id = getattr(ns, "statement_id", "") or getattr(ns, "action", "")
    if ns.command in ("norm", "approx", "verify"):
        # fail fast on bad ranges before any computation
        _space(options)
    return RunConfig(command=ns.command, statement_id=statement_id, options=options)


def _space(options: dict):
    return validate_params(options["n"], options["s"], options["p"], options["a"])


def _spec(options: dict) -> QuadratureSpec:
    return QuadratureSpec(
        method=options["method"],
        samples=options["samples"],
        grid_points=options["grid_points"],
        seed=options["seed"],
        outer_radius=options["outer_radius"],
    )


def _float_ladder(options: dict, default: list) -> list:
    if options["ladder"] is None:
        ladder = list(default)
    else:
        ladder = [float(v) for v in options["ladder"]]
    if options["reversed_ladder"]:
        ladder = ladder[::-1]
    return ladder


def _resolved_config(config: RunConfig) -> dict:
    out = {k: v for k, v in config.options.items()}
    out["command"] = config.command
    if config.statement_id:
        out["statement_id"] = config.statement_id
    return out


def _run_norm(config: RunConfig) -> tuple:
    opts = config.options
    params = _space(opts)
    u = field_from_spec(opts["field"], space=params)
    report = norm_full(u, params, _spec(opts))
    return {"report": report.as_dict()}, ["Pass"]


def _run_approx(config: RunConfig) -> tuple:
    opts = config.options
    params = _space(opts)
    u = field_from_spec(opts["field"], space=params)
    rho = pipeline_rho(
        u, opts["j"], opts["eps"], default_cutoff(), default_mollifier(params.n), opts["conv_grid"]
    )
    err = norm_full(subtract(u, rho), params, _spec(opts))
    return {
        "report": {
            "field": u.label,
            "rho": rho.label,
            "j": opts["j"],
            "epsilon": opts["eps"],
            "rho_support_radius": rho.support_radius,
            "rho_smoothness": rho.smoothness,
            "error": err.as_dict(),
        }
    }, ["Pass"]


def _admissible_grid(params, count: int = 3) -> list:
    n, sp = params.n, params.sp
    lo = -0.9 * sp
    hi = 0.45 * n  # alpha + beta stays below 0.9 * n
    vals = np.linspace(lo, hi, count)
    return [validate_general_weights(params, float(al), float(be)) for al in vals for be in vals]


def _run_verify(config: RunConfig) -> tuple:
    opts = config.options
    sid = config.statement_id
    params = _space(opts)
    spec = _spec(opts)
    cutoff = default_cutoff()

    if sid == "lemma-2.1":
        rep = check_finiteness_smooth(smooth_bump_field(1.0), params, _admissible_grid(params), spec)
        return {"report": rep}, [rep["verdict"]]
    if sid == "lemma-3.1":
        rep = run_truncation_convergence(
            polynomial_tail_field(3.0), params, _float_ladder(opts, [1, 2, 4, 8, 16]), spec, cutoff
        )
        return {"report": rep.as_dict()}, [rep.verdict]
    if sid in ("prop-4.1", "prop-4.2"):
        kind = WeightKind.PAIR if sid == "prop-4.1" else WeightKind.POINT
        rep = check_averaged_weight_bound(kind, params, opts["trials"], opts["seed"])
        return {"report": rep.as_dict()}, [rep.verdict]
    if sid == "lemma-4.3":
        base = hat_1d_field() if params.n == 1 else smooth_bump_field(1.0)
        V = lift_difference_quotient(base, params)
        rep = check_maximal_bound(V, WeightKind.PAIR, params, params.p, [0.1, 1.0, 10.0], spec)
        return {"report": rep.as_dict()}, [rep.verdict]
    if sid in ("prop-4.4", "prop-4.5"):
        u = field_from_spec(opts["field"], space=params)
        entry = lift_difference_quotient(u, params) if sid == "prop-4.4" else u
        rep = check_star_convolution_bound(
            entry, params, default_mollifier(params.n), spec, conv_grid=opts["conv_grid"]
        )
        return {"report": rep.as_dict()}, [rep.verdict]
    if sid == "lemma-5.1":
        if params.n == 1:
            base = make_field("singular_spike", space=params, gamma=0.2, R=1.0)
        else:
            base = smooth_bump_field(1.0)
        v = lift_difference_quotient(base, params)
        rep = run_clipping_convergence(v, params, _float_ladder(opts, [1, 4, 16, 64, 256]), spec)
        return {"report": rep.as_dict()}, [rep.verdict]
    if sid == "eq-6.4":
        u = field_from_spec(opts["field"], space=params)
        rep = check_commutation_identity(
            u, params, opts["eps"], 100, opts["seed"], default_mollifier(params.n), opts["conv_grid"]
        )
        return {"report": rep}, [rep["verdict"]]
    if sid == "lemma-6.1":
        u = field_from_spec(opts["field"], space=params)
        rep = run_mollification_convergence(
            u, params, _float_ladder(opts, [1, 0.5, 0.25, 0.1, 0.05]), spec,
            default_mollifier(params.n), opts["conv_grid"],
        )
        return {"report": rep.as_dict()}, [rep.verdict]
    if sid == "theorem-1.1":
        u = polynomial_tail_field(3.0)
        base = norm_full(u, params, spec)
        delta = opts["delta_frac"] * base.full
        rep = run_density_experiment(
            u, params, delta, spec, cutoff, default_mollifier(params.n), opts["conv_grid"]
        )
        return {"report": rep, "base_norm": base.as_dict()}, [rep["verdict"]]
    if sid == "sobolev-ineq":
        fields = [smooth_bump_field(1.0), smooth_bump_field(3.0)]
        rep = check_sobolev_inequality(fields, params, spec)
        return {"report": rep.as_dict()}, [rep.verdict]
    raise UsageError(f"unknown statement id {sid!r}")


def run_command(config: RunConfig) -> tuple:
    """Dispatch a parsed config; returns (ResultRecord or None, exit code)."""
    if config.command == "catalog":
        print("\n".join(_CATALOG_IDS))
        return None, 0

    if config.command == "sweep":
        opts = config.options
        key = opts["param"]
        records = []
        code = 0
        for i, raw in enumerate(opts["values"]):
            point = dict(opts)
            point[key] = int(raw) if key in _INT_KEYS else float(raw)
            sub = RunConfig(command="norm", statement_id="", options=point)
            outputs, verdicts = _run_norm(sub)
            rec = make_record("norm", _resolved_config(sub), outputs, verdicts)
            write_outputs(rec, opts["format"], opts["out"], f"sweep_{key}_{i}")
            records.append(rec)
        print(f"sweep: wrote {len(records)} records to {opts['out']}")
        return records, code

    if config.command == "norm":
        outputs, verdicts = _run_norm(config)
    elif config.command == "approx":
        outputs, verdicts = _run_approx(config)
    elif config.command == "verify":
        outputs, verdicts = _run_verify(config)
    else:
        raise UsageError(f"unknown command {config.command!r}")

    record = make_record(config.command, _resolved_config(config), outputs, verdicts)
    stem = config.command if not config.statement_id else f"verify_{config.statement_id}"
    paths = write_outputs(record, config.options["format"], config.options["out"], stem)
    ok = all(v in PASS_VERDICTS for v in verdicts)
    print(f"{config.command} {config.statement_id}".strip() + f": {','.join(verdicts)} -> {paths}")
    return record, 0 if ok else 1


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        config = parse_config(argv)
        _, code = run_command(config)
        return code
    except (UsageError, RangeViolation, ParameterOutOfRange, UnknownCatalogId, NonNormalizableDensity) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except IoError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return 3
    except (QuadratureFailure, OracleUnavailable, DegenerateDenominator) as exc:
        print(f"failure: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
