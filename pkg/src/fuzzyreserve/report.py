"""Reserve reports: JSON documents and plain-text tables."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from importlib import resources
from typing import Any, Optional

from . import glm as glm_mod
from . import hybrid as hybrid_mod
from .bootstrap import BootstrapResult
from .triangle import Reserves, RunOffTriangle

SCHEMA_VERSION = "1.0.0"


def load_schema() -> dict:
    return json.loads(resources.files("fuzzyreserve").joinpath("report.schema.json").read_text())


def _num(x: Optional[float]) -> Optional[float]:
    if x is None:
        return None
    x = float(x)
    return x if math.isfinite(x) else None


@dataclass
class ReserveReport:
    model: str
    k: int
    per_origin: list[tuple[int, float]]
    total: float
    coefficients: list[dict]
    predictions: list[list[float]]
    h_star: Optional[float] = None
    psi: Optional[float] = None
    lp_objective: Optional[float] = None
    variability: Optional[dict] = None
    provenance: dict = field(default_factory=dict)

    def to_dict(self) -> dict[str, Any]:
        return {
            "schema_version": SCHEMA_VERSION,
            "kind": "reserve_report",
            "model": self.model,
            "k": self.k,
            "per_origin": [{"origin": i, "reserve": _num(r)} for i, r in self.per_origin],
            "total": _num(self.total),
            "h_star": _num(self.h_star),
            "psi": _num(self.psi),
            "lp_objective": _num(self.lp_objective),
            "variability": self.variability,
            "coefficients": self.coefficients,
            "predictions": [[_num(v) for v in row] for row in self.predictions],
            "provenance": self.provenance,
        }


def _per_origin(res: Reserves) -> list[tuple[int, float]]:
    return [(i + 1, r) for i, r in enumerate(res.per_origin)]


def classical_report(t: RunOffTriangle, fit: glm_mod.GlmFit, provenance: dict) -> ReserveReport:
    res = glm_mod.reserve(fit, t)
    coefs = [{"name": n, "value": float(v)} for n, v in zip(glm_mod.coefficient_names(t.k), fit.coef)]
    return ReserveReport(
        model="classical",
        k=t.k,
        per_origin=_per_origin(res),
        total=res.total,
        coefficients=coefs,
        predictions=glm_mod.prediction_square(fit).tolist(),
        psi=fit.psi,
        provenance=provenance,
    )


def hybrid_report(t: RunOffTriangle, m: hybrid_mod.FuzzyModel, provenance: dict) -> ReserveReport:
    res = hybrid_mod.hybrid_reserve(m, t)
    coefs = [{"name": n, "tfn": a.to_json()} for n, a in zip(glm_mod.coefficient_names(t.k), m.coefficients)]
    return ReserveReport(
        model="hybrid",
        k=t.k,
        per_origin=_per_origin(res),
        total=res.total,
        coefficients=coefs,
        predictions=hybrid_mod.prediction_square(m).tolist(),
        h_star=m.h_star,
        psi=m.glm.psi if m.glm is not None else None,
        lp_objective=m.lp_objective,
        provenance=provenance,
    )


def variability(result: BootstrapResult, replications: int, seed: int) -> dict:
    return {
        "ep": _num(result.ep),
        "sd": _num(result.sd),
        "mse": _num(result.mse),
        "psi_used": _num(result.psi_used),
        "replications": replications,
        "seed": seed,
        "failures": result.failures,
    }


def comparison(classical: ReserveReport, hybrid: ReserveReport, provenance: dict) -> dict:
    cv, hv = classical.variability, hybrid.variability
    winners = {}
    for key in ("ep", "sd", "mse"):
        winners[key] = "hybrid" if hv[key] < cv[key] else "classical"
    return {
        "schema_version": SCHEMA_VERSION,
        "kind": "comparison",
        "classical": classical.to_dict(),
        "hybrid": hybrid.to_dict(),
        "winners": winners,
        "provenance": provenance,
    }


def dumps(doc: dict) -> str:
    return json.dumps(doc, indent=2, allow_nan=False) + "\n"


def _fmt(v: Optional[float]) -> str:
    return "-" if v is None else f"{v:,.2f}"


def render_table(doc: dict) -> str:
    if doc["kind"] == "comparison":
        return _render_comparison(doc)
    lines = [f"model: {doc['model']}  (k={doc['k']})"]
    if doc["h_star"] is not None:
        lines.append(f"h*: {doc['h_star']:.6f}")
    if doc["psi"] is not None:
        lines.append(f"psi: {doc['psi']:.2f}")
    lines.append("")
    lines.append("coefficients:")
    for c in doc["coefficients"]:
        if "tfn" in c:
            l, m, r = c["tfn"]
            lines.append(f"  {c['name']:>9}  ({l:.4f}, {m:.4f}, {r:.4f})")
        else:
            lines.append(f"  {c['name']:>9}  {c['value']:.4f}")
    lines.append("")
    lines.append("predictions:")
    for i, row in enumerate(doc["predictions"], start=1):
        lines.append(f"  {i:>3} " + " ".join(f"{_fmt(v):>14}" for v in row))
    lines.append("")
    lines.append("reserves:")
    for r in doc["per_origin"]:
        lines.append(f"  {r['origin']:>3} {_fmt(r['reserve']):>16}")
    lines.append(f"  total {_fmt(doc['total']):>14}")
    v = doc.get("variability")
    if v:
        lines.append("")
        lines.append(f"EP:  {_fmt(v['ep'])}")
        lines.append(f"SD:  {_fmt(v['sd'])}")
        lines.append(f"MSE: {_fmt(v['mse'])}")
    return "\n".join(lines) + "\n"


def _render_comparison(doc: dict) -> str:
    c, h, w = doc["classical"], doc["hybrid"], doc["winners"]
    rows = [
        ("reserve", c["total"], h["total"], None),
        ("EP", c["variability"]["ep"], h["variability"]["ep"], w["ep"]),
        ("SD", c["variability"]["sd"], h["variability"]["sd"], w["sd"]),
        ("MSE", c["variability"]["mse"], h["variability"]["mse"], w["mse"]),
    ]
    lines = [f"{'':<8} {'classical':>16} {'hybrid':>16}  better"]
    for name, cv, hv, win in rows:
        lines.append(f"{name:<8} {_fmt(cv):>16} {_fmt(hv):>16}  {win or ''}")
    lines.append(f"h* = {h['h_star']:.6f}")
    return "\n".join(lines) + "\n"
