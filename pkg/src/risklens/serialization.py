"""JSON documents for every public type.

Readers raise :class:`SchemaError` on malformed input; numbers may be given
as JSON numbers or decimal strings.  Writers emit plain floats.
"""

from __future__ import annotations

import json
import math
from importlib import resources
from typing import Any

from risklens.comparative_statics import CaraSpec, PhysicalOutsideOption
from risklens.distributions import Atom, ExtendedCDF, UniformPiece
from risklens.errors import DomainError, SchemaError
from risklens.outside_option import OORepresentation
from risklens.preferences import RiskAttitude, SimpleLottery
from risklens.transformations import Decomposition, LotteryKernel


def number(value: Any, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float, str)):
        raise SchemaError(f"{where}: expected a number, got {type(value).__name__}")
    try:
        out = float(value)
    except ValueError:
        raise SchemaError(f"{where}: {value!r} is not a number") from None
    if math.isnan(out):
        raise SchemaError(f"{where}: NaN is not allowed")
    return out


def json_object(doc: Any, where: str, required: tuple[str, ...]) -> dict:
    if not isinstance(doc, dict):
        raise SchemaError(f"{where}: expected an object")
    missing = [k for k in required if k not in doc]
    if missing:
        raise SchemaError(f"{where}: missing key(s) {', '.join(missing)}")
    return doc


def json_array(doc: Any, where: str) -> list:
    if not isinstance(doc, list):
        raise SchemaError(f"{where}: expected an array")
    return doc


def _build(where: str, factory, *args):
    try:
        return factory(*args)
    except DomainError as exc:
        raise SchemaError(f"{where}: {exc}") from None


def cdf_from_json(doc: Any, where: str = "cdf") -> ExtendedCDF:
    doc = json_object(doc, where, ())
    alpha = number(doc.get("neg_inf_mass", 0.0), f"{where}.neg_inf_mass")
    atoms = tuple(
        Atom(number(json_object(a, f"{where}.atoms[{i}]", ("at", "mass"))["at"], f"{where}.atoms[{i}].at"),
             number(a["mass"], f"{where}.atoms[{i}].mass"))
        for i, a in enumerate(json_array(doc.get("atoms", []), f"{where}.atoms"))
    )
    pieces = []
    for i, p in enumerate(json_array(doc.get("uniform", []), f"{where}.uniform")):
        p = json_object(p, f"{where}.uniform[{i}]", ("from", "to", "mass"))
        pieces.append(UniformPiece(
            number(p["from"], f"{where}.uniform[{i}].from"),
            number(p["to"], f"{where}.uniform[{i}].to"),
            number(p["mass"], f"{where}.uniform[{i}].mass"),
        ))
    return _build(where, ExtendedCDF, alpha, atoms, tuple(pieces))


def cdf_to_json(F: ExtendedCDF) -> dict:
    return {
        "neg_inf_mass": F.neg_inf_mass,
        "atoms": [{"at": a.at, "mass": a.mass} for a in F.atoms],
        "uniform": [{"from": p.lo, "to": p.hi, "mass": p.mass} for p in F.uniform],
    }


def attitude_from_json(doc: Any, where: str = "attitude") -> RiskAttitude:
    doc = json_object(doc, where, ("alternatives", "values"))
    xs = [number(x, f"{where}.alternatives[{i}]") for i, x in enumerate(json_array(doc["alternatives"], f"{where}.alternatives"))]
    us = [number(u, f"{where}.values[{i}]") for i, u in enumerate(json_array(doc["values"], f"{where}.values"))]
    return _build(where, RiskAttitude, tuple(xs), tuple(us))


def attitude_to_json(u: RiskAttitude) -> dict:
    return {"alternatives": list(u.alternatives), "values": list(u.values)}


def lottery_from_json(doc: Any, where: str = "lottery") -> SimpleLottery:
    doc = json_object(doc, where, ("support",))
    pairs = []
    for i, item in enumerate(json_array(doc["support"], f"{where}.support")):
        item = json_object(item, f"{where}.support[{i}]", ("at", "p"))
        pairs.append((number(item["at"], f"{where}.support[{i}].at"), number(item["p"], f"{where}.support[{i}].p")))
    return _build(where, SimpleLottery, tuple(pairs))


def lottery_to_json(p: SimpleLottery) -> dict:
    return {"support": [{"at": x, "p": q} for x, q in p.support]}


def representation_from_json(doc: Any, where: str = "representation") -> OORepresentation:
    doc = json_object(doc, where, ("v", "F"))
    v = attitude_from_json(doc["v"], f"{where}.v")
    F = cdf_from_json(doc["F"], f"{where}.F")
    alpha = number(doc.get("alpha", 1.0), f"{where}.alpha")
    beta = number(doc.get("beta", 0.0), f"{where}.beta")
    return _build(where, OORepresentation, v, F, alpha, beta)


def representation_to_json(rep: OORepresentation) -> dict:
    return {
        "v": attitude_to_json(rep.v),
        "F": cdf_to_json(rep.F),
        "alpha": rep.alpha,
        "beta": rep.beta,
    }


def cara_from_json(doc: Any, where: str = "cara") -> CaraSpec:
    doc = json_object(doc, where, ("sigma", "lambda", "x0"))
    return _build(
        where,
        CaraSpec,
        number(doc["sigma"], f"{where}.sigma"),
        number(doc["lambda"], f"{where}.lambda"),
        number(doc["x0"], f"{where}.x0"),
    )


def outside_option_from_json(doc: Any, where: str = "mu") -> PhysicalOutsideOption:
    doc = json_object(doc, where, ("unavailable",))
    options = []
    for i, item in enumerate(json_array(doc.get("options", []), f"{where}.options")):
        item = json_object(item, f"{where}.options[{i}]", ("at", "mass"))
        options.append((number(item["at"], f"{where}.options[{i}].at"), number(item["mass"], f"{where}.options[{i}].mass")))
    return _build(where, PhysicalOutsideOption, number(doc["unavailable"], f"{where}.unavailable"), tuple(options))


def kernel_from_json(doc: Any, where: str = "kernel") -> LotteryKernel:
    doc = json_object(doc, where, ("X", "kernels"))
    X = [number(x, f"{where}.X[{i}]") for i, x in enumerate(json_array(doc["X"], f"{where}.X"))]
    by_at = {}
    for i, item in enumerate(json_array(doc["kernels"], f"{where}.kernels")):
        item = json_object(item, f"{where}.kernels[{i}]", ("at", "cdf"))
        at = number(item["at"], f"{where}.kernels[{i}].at")
        if at in by_at:
            raise SchemaError(f"{where}.kernels: duplicate entry for {at:g}")
        by_at[at] = cdf_from_json(item["cdf"], f"{where}.kernels[{i}].cdf")
    if sorted(by_at) != sorted(X):
        raise SchemaError(f"{where}: kernel entries must match X exactly")
    X = sorted(X)
    return _build(where, LotteryKernel, tuple(X), tuple(by_at[x] for x in X))


def kernel_to_json(k: LotteryKernel) -> dict:
    return {
        "X": list(k.X),
        "kernels": [{"at": x, "cdf": cdf_to_json(G)} for x, G in zip(k.X, k.cdfs)],
    }


def decomposition_from_json(doc: Any, where: str = "decomposition") -> Decomposition:
    doc = json_object(doc, where, ("lambda", "G", "H"))
    H_star = doc.get("H_star")
    return _build(
        where,
        Decomposition,
        number(doc["lambda"], f"{where}.lambda"),
        cdf_from_json(doc["G"], f"{where}.G"),
        cdf_from_json(doc["H"], f"{where}.H"),
        None if H_star is None else cdf_from_json(H_star, f"{where}.H_star"),
    )


def decomposition_to_json(d: Decomposition) -> dict:
    return {
        "lambda": d.lam,
        "G": cdf_to_json(d.G),
        "H": cdf_to_json(d.H),
        "H_star": None if d.H_star is None else cdf_to_json(d.H_star),
        "H_arbitrary": d.H_arbitrary,
    }


def load_background_risk():
    """The shipped background-risk counterexample: ``(kernel, v, lottery, x)``."""
    text = resources.files("risklens").joinpath("data/background_risk.json").read_text("utf-8")
    doc = json.loads(text)
    return (
        kernel_from_json(doc["kernel"], "kernel"),
        attitude_from_json(doc["v"], "v"),
        lottery_from_json(doc["lottery"], "lottery"),
        number(doc["x"], "x"),
    )
