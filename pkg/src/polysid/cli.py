"""Command-line interface: gen, identify, predict, evaluate, inspect."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import dataio
from .errors import ConfigError, PolysidError
from .generate import generate, spec_from_kv
from .model import (
    ObserverModel,
    deserialize_model,
    predict_with_burn_in,
    serialize_model,
)
from .monomials import monomial_name
from .pipeline import IdentConfig, IdentDiagnostics, identify


def config_from_kv(text: str, origin: str = "<config>") -> IdentConfig:
    """Build an IdentConfig from a flat key-value document.

    The four thresholds r1..r4 are mandatory; structural parameters fall back
    to their defaults (echoed into the identification report).
    """
    kv = dataio.parse_kv(text, origin)
    for key in ("r1", "r2", "r3", "r4"):
        if key not in kv:
            raise ConfigError(f"{origin}: threshold {key!r} is mandatory")
    known = {
        "r1", "r2", "r3", "r4",
        "t_plus_min", "t_minus_min", "t_plus_max", "t_minus_max",
        "k_max_y", "k_max_x", "k_max_y2",
        "block_limit", "anchor_t", "pool_windows", "n_expected",
        "max_total_degree_xy", "scale_outputs", "scale_gamma",
        "balance_state", "row_cap",
    }
    unknown = set(kv) - known
    if unknown:
        raise ConfigError(f"{origin}: unknown config keys: {', '.join(sorted(unknown))}")

    kwargs: dict = {key: dataio.kv_float(kv[key], key) for key in ("r1", "r2", "r3", "r4")}
    for key in ("t_plus_min", "t_minus_min", "t_plus_max", "t_minus_max",
                "block_limit", "anchor_t", "n_expected", "max_total_degree_xy",
                "row_cap"):
        if key in kv:
            kwargs[key] = dataio.kv_int(kv[key], key)
    if "scale_gamma" in kv:
        kwargs["scale_gamma"] = dataio.kv_float(kv["scale_gamma"], "scale_gamma")
    for key in ("k_max_y", "k_max_x", "k_max_y2"):
        if key in kv:
            vec = dataio.kv_int_vector(kv[key], key)
            kwargs[key] = vec[0] if len(vec) == 1 else vec
    for key in ("pool_windows", "scale_outputs", "balance_state"):
        if key in kv:
            kwargs[key] = dataio.kv_bool(kv[key], key)
    return IdentConfig(**kwargs)


def render_report(diag: IdentDiagnostics) -> str:
    """Plain-text diagnostics report with fixed section headers."""
    lines: list[str] = []
    lines.append("CONFIG")
    for key, value in diag.config_echo.items():
        lines.append(f"{key} = {value}")
    lines.append("")

    lines.append("HORIZONS")
    lines.append(f"anchor_t = {diag.anchor_t}")
    lines.append(f"pooled = {str(diag.pooled).lower()}")
    lines.append(f"columns = {diag.n_columns}")
    lines.append(f"chosen_t_plus = {diag.chosen_t_plus}")
    lines.append(f"chosen_t_minus = {diag.chosen_t_minus}")
    lines.append("t_plus t_minus block n1 rows_presented rows_kept")
    for rec in diag.reductions:
        lines.append(
            f"{rec.t_plus} {rec.t_minus} {rec.block_index}/{rec.block_count} "
            f"{rec.n1} {rec.rows_presented} {rec.rows_kept}"
        )
    lines.append("")

    lines.append("TABLE1")
    for rec in diag.reductions:
        lines.append(
            f"# t_plus={rec.t_plus} t_minus={rec.t_minus} "
            f"block={rec.block_index}/{rec.block_count}"
        )
        lines.append(rec.table1.to_text())
    lines.append("")

    lines.append("TABLE2")
    if diag.table2 is not None:
        lines.append(diag.table2.to_text())
    lines.append("")

    lines.append("GENERATORS")
    lines.append(f"retained_rank_n1 = {diag.n1}")
    lines.append(f"retained_rank_n2 = {diag.n2}")
    lines.append(
        f"state_components_before_elimination = {diag.generators_before_elimination}"
    )
    lines.append(
        f"state_components_after_elimination = {diag.generators_after_elimination}"
    )
    lines.append(f"f_monomials_before = {diag.f_monomials_before}")
    lines.append(f"f_monomials_after = {diag.f_monomials_after}")
    lines.append("")

    lines.append("RESIDUALS")
    lines.append(f"training_relative_rmse = {diag.training_relative_rmse:.6g}")
    lines.append("series rmse")
    if diag.training_rmse_per_series is not None:
        for k, v in enumerate(diag.training_rmse_per_series, start=1):
            lines.append(f"{k} {v:.6g}")
    return "\n".join(lines) + "\n"


def _model_var_names(model: ObserverModel) -> tuple[list[str], list[str]]:
    x_names = [f"x{i + 1}" for i in range(model.n)]
    y_names = ["y"] if model.d_y == 1 else [f"y{j + 1}" for j in range(model.d_y)]
    return x_names, y_names


def _coeff_rows(L: np.ndarray) -> list[str]:
    return ["(" + ", ".join(repr(float(v)) for v in row) + ")" for row in L]


def cmd_gen(args: argparse.Namespace) -> int:
    spec = spec_from_kv(Path(args.spec).read_text(), args.spec)
    ts = generate(spec, args.seed)
    dataio.emit(ts, args.out)
    print(f"wrote {ts.s} series of length {ts.t_1} (d_y={ts.d_y}) to {args.out}")
    return 0


def cmd_identify(args: argparse.Namespace) -> int:
    ts = dataio.ingest(args.data)
    cfg = config_from_kv(Path(args.config).read_text(), args.config)
    model, diag = identify(ts, cfg)
    Path(args.out_model).write_text(serialize_model(model) + "\n")
    Path(args.report).write_text(render_report(diag))
    print(
        f"identified n={model.n} state model; training relative RMSE "
        f"{diag.training_relative_rmse:.3g}; model -> {args.out_model}, "
        f"report -> {args.report}"
    )
    return 0


def cmd_predict(args: argparse.Namespace) -> int:
    model = deserialize_model(Path(args.model).read_text())
    ts = dataio.ingest(args.data)
    report = predict_with_burn_in(model, ts)
    d = model.d_y
    header = (
        "series,t,"
        + ",".join(f"yhat{i + 1}" for i in range(d))
        + ","
        + ",".join(f"resid{i + 1}" for i in range(d))
    )
    lines = [header]
    steps = report.predictions.shape[0]
    for k in range(ts.s):
        for i in range(steps):
            t = report.t_start + i
            vals = [repr(float(v)) for v in report.predictions[i, :, k]]
            vals += [repr(float(v)) for v in report.residuals[i, :, k]]
            lines.append(f"{k + 1},{t}," + ",".join(vals))
    Path(args.out).write_text("\n".join(lines) + "\n")
    print(
        f"predicted t={report.t_start}..{ts.t_1} for {ts.s} series; max relative "
        f"RMSE {report.max_relative_rmse:.3g}; wrote {args.out}"
    )
    return 0


def cmd_evaluate(args: argparse.Namespace) -> int:
    model = deserialize_model(Path(args.model).read_text())
    ts = dataio.ingest(args.data)
    report = predict_with_burn_in(model, ts)
    print("dimension rmse relative_rmse")
    for i in range(model.d_y):
        print(f"y{i + 1} {report.rmse[i]:.9g} {report.relative_rmse[i]:.9g}")
    return 0


def cmd_inspect(args: argparse.Namespace) -> int:
    model = deserialize_model(Path(args.model).read_text())
    x_names, y_names = _model_var_names(model)
    print(f"n = {model.n}")
    print(f"d_y = {model.d_y}")
    h_basis = ", ".join(monomial_name(k, x_names) for k in model.h_o.K.K)
    print(f"h_o basis: {h_basis}")
    print("h_o coefficients:")
    for row in _coeff_rows(model.h_o.L):
        print(f"  {row}")
    f_basis = ", ".join(monomial_name(k, x_names + y_names) for k in model.f_o.K.K)
    print(f"f_o basis: {f_basis}")
    print("f_o coefficients:")
    for row in _coeff_rows(model.f_o.L):
        print(f"  {row}")
    if model.scaling is not None:
        print("output scaling:")
        print(f"  mean: {tuple(float(v) for v in model.scaling.mean)}")
        print(f"  std: {tuple(float(v) for v in model.scaling.std)}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="polysid",
        description=(
            "Identify discrete-time polynomial observer models from output "
            "time series and evaluate their one-step predictions."
        ),
    )
    sub = p.add_subparsers(dest="command", required=True)

    pg = sub.add_parser("gen", help="generate synthetic series from a generator spec")
    pg.add_argument("--spec", required=True, help="generator spec document")
    pg.add_argument("--seed", required=True, type=int, help="PRNG seed")
    pg.add_argument("--out", required=True, help="output series file")
    pg.set_defaults(func=cmd_gen)

    pi = sub.add_parser("identify", help="identify an observer model from series")
    pi.add_argument("--data", required=True, help="input series file")
    pi.add_argument("--config", required=True, help="identification config document")
    pi.add_argument("--out-model", required=True, help="output model document")
    pi.add_argument("--report", required=True, help="output diagnostics report")
    pi.set_defaults(func=cmd_identify)

    pp = sub.add_parser("predict", help="one-step predictions on a series file")
    pp.add_argument("--model", required=True, help="model document")
    pp.add_argument("--data", required=True, help="input series file")
    pp.add_argument("--out", required=True, help="output predictions file")
    pp.set_defaults(func=cmd_predict)

    pe = sub.add_parser("evaluate", help="print per-dimension prediction RMSE")
    pe.add_argument("--model", required=True, help="model document")
    pe.add_argument("--data", required=True, help="input series file")
    pe.set_defaults(func=cmd_evaluate)

    ps = sub.add_parser("inspect", help="print a model in human-readable form")
    ps.add_argument("--model", required=True, help="model document")
    ps.set_defaults(func=cmd_inspect)

    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except PolysidError as exc:
        message = str(exc).splitlines() or [""]
        print(f"error: {exc.code}: {message[0]}", file=sys.stderr)
        for extra in message[1:]:
            print(extra, file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: IO: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
