"""Command-line interface: JSON in, JSON or CSV out.

Exit codes: 0 ok, 1 property violated (the document carries a witness),
2 input error, 3 numeric failure.
"""

from __future__ import annotations

import functools
import io
import json
import sys
from dataclasses import dataclass

import click
import numpy as np

from risklens import serialization as ser
from risklens.comparative_statics import (
    cara_effective_rho,
    cara_numeric_check,
    mcs_part_a_check,
    mcs_part_b_check,
)
from risklens.core_numeric import TOL_EXACT, TOL_NUMERIC
from risklens.errors import DomainError, NotLessRiskAverse, NumericalFailure, SchemaError
from risklens.outside_option import (
    OORepresentation,
    effective_utility,
    exercise_probability,
    identify_F,
    is_concentrated_on_image,
    verify_representation,
)
from risklens.preferences import (
    CrossRatioViolation,
    LotteryViolation,
    OrdinalViolation,
    crossratio_violation,
    less_risk_averse_oracle,
)
from risklens.transformations import PrattWitness, decompose, risk_reduction_agreement

EXIT_OK, EXIT_VIOLATED, EXIT_INPUT, EXIT_NUMERIC = 0, 1, 2, 3


@dataclass(frozen=True)
class RunConfig:
    tol_exact: float = TOL_EXACT
    tol_numeric: float = TOL_NUMERIC
    seed: int = 0
    trials: int = 500
    output_format: str = "json"

    def __post_init__(self):
        if not (self.tol_exact > 0 and self.tol_numeric > 0):
            raise SchemaError("tolerances must be positive")
        if self.trials < 1:
            raise SchemaError("--trials must be at least 1")


@dataclass
class Outcome:
    doc: dict
    code: int = EXIT_OK
    table: tuple[list[str], list[list]] | None = None
    comment: str | None = None


def violation_to_json(violation) -> dict | None:
    if violation is None:
        return None
    if isinstance(violation, OrdinalViolation):
        lottery, x = violation.witness()
        return {
            "kind": "ordinal",
            "pair": [violation.x, violation.y],
            "u": list(violation.u_values),
            "v": list(violation.v_values),
            "lottery": ser.lottery_to_json(lottery),
            "x": x,
        }
    if isinstance(violation, CrossRatioViolation):
        lottery, x = violation.witness()
        return {
            "kind": "crossratio",
            "triple": [violation.x, violation.y, violation.z],
            "ratio_u": violation.ratio_u,
            "ratio_v": violation.ratio_v,
            "lottery": ser.lottery_to_json(lottery),
            "x": x,
        }
    if isinstance(violation, LotteryViolation):
        return {
            "kind": f"lottery_{violation.kind}",
            "lottery": ser.lottery_to_json(violation.lottery),
            "x": violation.x,
            "u_margin": violation.u_margin,
            "v_margin": violation.v_margin,
        }
    raise TypeError(type(violation))


def pratt_witness_to_json(w: PrattWitness | None) -> dict | None:
    if w is None:
        return None
    return {
        "v": ser.attitude_to_json(w.v),
        "lottery": ser.lottery_to_json(w.lottery),
        "x": w.x,
        "m_margin": w.m_margin,
        "v_margin": w.v_margin,
    }


def failure_to_json(f) -> dict | None:
    if f is None:
        return None
    return {
        "claim": f.claim,
        "message": f.message,
        "pair": None if f.pair is None else list(f.pair),
        "point": f.point,
    }


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17g")
    return str(value)


def _flatten(doc, prefix="") -> list[tuple[str, object]]:
    rows = []
    if isinstance(doc, dict):
        for key in sorted(doc):
            rows.extend(_flatten(doc[key], f"{prefix}.{key}" if prefix else key))
    elif isinstance(doc, list):
        for i, item in enumerate(doc):
            rows.extend(_flatten(item, f"{prefix}[{i}]"))
    else:
        rows.append((prefix, doc))
    return rows


def render(outcome: Outcome, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(outcome.doc, sort_keys=True, indent=2, allow_nan=False) + "\n"
    buf = io.StringIO()
    if outcome.comment:
        buf.write(f"# {outcome.comment}\n")
    if outcome.table is not None:
        header, rows = outcome.table
    else:
        header, rows = ["key", "value"], [list(r) for r in _flatten(outcome.doc)]
    buf.write(",".join(header) + "\n")
    for row in rows:
        buf.write(",".join(_fmt(c) for c in row) + "\n")
    return buf.getvalue()


def _load(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise SchemaError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path} is not valid JSON: {exc.msg} at line {exc.lineno}") from None


def common_options(fn):
    @click.option("--input", "input_path", required=True, type=click.Path(dir_okay=False),
                  help="Input JSON document.")
    @click.option("--output", "output_path", type=click.Path(dir_okay=False), default=None,
                  help="Write the result here instead of standard output.")
    @click.option("--tol", type=float, default=TOL_EXACT, show_default=True,
                  help="Tolerance for exact piecewise arithmetic.")
    @click.option("--tol-numeric", type=float, default=TOL_NUMERIC, show_default=True,
                  help="Tolerance for finite-difference quantities.")
    @click.option("--seed", type=int, envvar="RISKLENS_SEED", default=0, show_default=True,
                  help="Random seed (falls back to RISKLENS_SEED).")
    @click.option("--trials", type=int, default=500, show_default=True,
                  help="Random lotteries for the oracle, or sampled utilities for check-kernel.")
    @click.option("--format", "fmt", type=click.Choice(["json", "csv"]), default="json",
                  show_default=True)
    @functools.wraps(fn)
    def wrapper(input_path, output_path, tol, tol_numeric, seed, trials, fmt):
        try:
            cfg = RunConfig(tol, tol_numeric, seed, trials, fmt)
            outcome = fn(_load(input_path), cfg)
        except NumericalFailure as exc:
            click.echo(f"numeric failure: {exc}", err=True)
            sys.exit(EXIT_NUMERIC)
        except (SchemaError, DomainError) as exc:
            click.echo(f"input error: {exc}", err=True)
            sys.exit(EXIT_INPUT)
        text = render(outcome, fmt)
        if output_path:
            with open(output_path, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(text)
        else:
            click.echo(text, nl=False)
        sys.exit(outcome.code)

    return wrapper


@click.group()
@click.version_option(package_name="risklens")
def main():
    """Outside-option models of risk attitude."""


@main.command()
@common_options
def effective(doc, cfg: RunConfig) -> Outcome:
    """Effective risk attitude of v under outside option F."""
    doc = ser.json_object(doc, "input", ("v", "F"))
    v = ser.attitude_from_json(doc["v"], "v")
    F = ser.cdf_from_json(doc["F"], "F")
    u = effective_utility(v, F)
    kept = exercise_probability(v, F)
    out = {"u": ser.attitude_to_json(u), "exercise_prob": [float(k) for k in kept]}
    table = (["x", "v", "u", "exercise_prob"],
             [[x, a, b, k] for x, a, b, k in zip(v.alternatives, v.values, u.values, kept)])
    return Outcome(out, table=table)


@main.command()
@common_options
def identify(doc, cfg: RunConfig) -> Outcome:
    """Outside-option distribution turning v into u."""
    doc = ser.json_object(doc, "input", ("u", "v"))
    u = ser.attitude_from_json(doc["u"], "u")
    v = ser.attitude_from_json(doc["v"], "v")
    try:
        ident = identify_F(u, v, cfg.tol_exact)
    except NotLessRiskAverse as exc:
        return Outcome({"violation": violation_to_json(exc.violation)}, EXIT_VIOLATED)
    rep = OORepresentation(v, ident.F, ident.alpha, ident.beta)
    return Outcome({
        "F": ser.cdf_to_json(ident.F),
        "alpha": ident.alpha,
        "beta": ident.beta,
        "lambda": ident.lam,
        "concentrated": is_concentrated_on_image(ident.F, v),
        "verified": verify_representation(u, rep, cfg.tol_exact),
    })


@main.command()
@common_options
def compare(doc, cfg: RunConfig) -> Outcome:
    """Is u less risk-averse than v?  Cross-ratio test and lottery oracle."""
    doc = ser.json_object(doc, "input", ("u", "v"))
    u = ser.attitude_from_json(doc["u"], "u")
    v = ser.attitude_from_json(doc["v"], "v")
    violation = crossratio_violation(u, v, cfg.tol_exact)
    oracle = less_risk_averse_oracle(u, v, cfg.trials, cfg.seed, cfg.tol_exact)
    out = {
        "crossratio": violation is None,
        "oracle": oracle.holds,
        "agree": (violation is None) == oracle.holds,
        "lotteries_checked": oracle.lotteries_checked,
        "violation": violation_to_json(violation),
        "oracle_violation": violation_to_json(oracle.violation),
    }
    ok = violation is None and oracle.holds
    return Outcome(out, EXIT_OK if ok else EXIT_VIOLATED)


@main.command("mcs-a")
@common_options
def mcs_a(doc, cfg: RunConfig) -> Outcome:
    """Outside option F_hat against F: less risk-averse versus reverse hazard rate order."""
    doc = ser.json_object(doc, "input", ("v", "F", "F_hat"))
    v = ser.attitude_from_json(doc["v"], "v")
    res = mcs_part_a_check(v, ser.cdf_from_json(doc["F"], "F"),
                           ser.cdf_from_json(doc["F_hat"], "F_hat"), cfg.tol_exact)
    out = {"lra": res.lra, "rhr": res.rhr, "agree": res.agree}
    return Outcome(out, EXIT_OK if res.agree else EXIT_VIOLATED)


@main.command("mcs-b")
@common_options
def mcs_b(doc, cfg: RunConfig) -> Outcome:
    """Same physical outside option, true attitudes v_hat against v."""
    doc = ser.json_object(doc, "input", ("v", "v_hat", "mu"))
    res = mcs_part_b_check(
        ser.attitude_from_json(doc["v"], "v"),
        ser.attitude_from_json(doc["v_hat"], "v_hat"),
        ser.outside_option_from_json(doc["mu"], "mu"),
        cfg.tol_exact,
    )
    out = {"lra_u": res.lra_u, "lra_v": res.lra_v, "agree": res.agree}
    return Outcome(out, EXIT_OK if res.agree else EXIT_VIOLATED)


@main.command()
@common_options
def cara(doc, cfg: RunConfig) -> Outcome:
    """CARA example: closed-form and finite-difference effective coefficient."""
    spec = ser.cara_from_json(doc, "input")
    grid = ser.json_object(doc.get("grid", {}), "input.grid", ())
    lo = ser.number(grid.get("lo", spec.x0 - 6.0), "input.grid.lo")
    n = grid.get("n", 4001)
    if isinstance(n, bool) or not isinstance(n, int):
        raise SchemaError("input.grid.n: expected an integer")
    window = doc.get("window")
    if window is not None:
        window = ser.json_array(window, "input.window")
        if len(window) != 2:
            raise SchemaError("input.window: expected [lo, hi]")
        window = (ser.number(window[0], "input.window[0]"), ser.number(window[1], "input.window[1]"))
    res = cara_numeric_check(spec, lo, n, window=window)
    rho = cara_effective_rho(spec)
    out = {
        "rho_closed_form": rho,
        "max_abs_err": res.max_abs_err,
        "within_tol_numeric": res.max_abs_err <= cfg.tol_numeric,
        "window": list(res.window),
        "points": [
            {"x": float(x), "v": float(a), "u": float(b), "rho_hat": float(r)}
            for x, a, b, r in zip(res.rho_x, res.v[1:-1], res.u[1:-1], res.rho_hat)
        ],
    }
    table = (["x", "v", "u", "rho_hat"],
             [[x, a, b, r] for x, a, b, r in zip(res.rho_x, res.v[1:-1], res.u[1:-1], res.rho_hat)])
    comment = f"rho_closed_form={_fmt(rho)} max_abs_err={_fmt(res.max_abs_err)}"
    return Outcome(out, table=table, comment=comment)


@main.command("decompose")
@common_options
def decompose_cmd(doc, cfg: RunConfig) -> Outcome:
    """Outside-option decomposition of a lottery kernel."""
    kernel = ser.kernel_from_json(doc, "input")
    res = decompose(kernel)
    if not res.ok:
        return Outcome({"failure": failure_to_json(res.failure)}, EXIT_VIOLATED)
    return Outcome({"decomposition": ser.decomposition_to_json(res.decomposition)})


@main.command("check-kernel")
@common_options
def check_kernel(doc, cfg: RunConfig) -> Outcome:
    """Does the kernel reduce risk aversion for every increasing v?  Sampled, plus decomposition."""
    kernel = ser.kernel_from_json(doc, "input")
    rep = risk_reduction_agreement(kernel, v_samples=cfg.trials, seed=cfg.seed, tol=cfg.tol_exact)
    out = {
        "lra": rep.lra,
        "oo_form": rep.oo_form,
        "agree": rep.agree,
        "summary": rep.risk.summary if rep.lra else "violation found",
        "witness": pratt_witness_to_json(rep.witness),
        "failure": failure_to_json(rep.decomposition.failure),
    }
    return Outcome(out, EXIT_OK if rep.lra else EXIT_VIOLATED)


if __name__ == "__main__":
    main()
