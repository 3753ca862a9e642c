"""Experiment registry: named, parameterised, reproducible runs over the library."""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable

import numpy as np

from . import __version__
from . import arith
from . import characters as ch
from . import moments, polya, realchar, smooth
from .errors import DomainError, ParamError, UnknownExperimentError
from .weights import WeightFunction

SEED_MAX = 2**64 - 1


@dataclass(frozen=True)
class Param:
    name: str
    type: type
    default: Any = None
    required: bool = False
    help: str = ""

    def coerce(self, value):
        if value is None:
            return None
        t = self.type
        try:
            if t is int:
                if isinstance(value, bool):
                    raise ValueError
                if isinstance(value, int):
                    return value
                if isinstance(value, float):
                    if not value.is_integer():
                        raise ValueError
                    return int(value)
                text = str(value).strip()
                try:
                    return int(text)
                except ValueError:
                    f = float(text)
                    if not f.is_integer():
                        raise
                    return int(f)
            if t is float:
                if isinstance(value, bool):
                    raise ValueError
                out = float(value)
                if math.isnan(out):
                    raise ValueError
                return out
            if t is bool:
                if isinstance(value, bool):
                    return value
                text = str(value).strip().lower()
                if text in ("1", "true", "yes", "on"):
                    return True
                if text in ("0", "false", "no", "off"):
                    return False
                raise ValueError
            return str(value)
        except (TypeError, ValueError, OverflowError):
            raise ParamError(self.name, f"expected {t.__name__}, got {value!r}") from None


@dataclass(frozen=True)
class Experiment:
    name: str
    description: str
    params: tuple[Param, ...]
    run: Callable[[dict, int], tuple[list[dict], dict]]

    @property
    def required(self) -> list[str]:
        return [p.name for p in self.params if p.required]


REGISTRY: dict[str, Experiment] = {}


def register(name: str, description: str, *params: Param):
    def deco(fn):
        REGISTRY[name] = Experiment(name, description, tuple(params), fn)
        return fn

    return deco


def list_experiments() -> list[tuple[str, str, list[str]]]:
    return [(e.name, e.description, e.required) for e in REGISTRY.values()]


def get_experiment(name: str) -> Experiment:
    try:
        return REGISTRY[name]
    except KeyError:
        raise UnknownExperimentError(f"unknown experiment {name!r}; try 'charlab list'") from None


@dataclass
class ExperimentConfig:
    name: str
    params: dict[str, Any] = field(default_factory=dict)
    seed: int = 0
    output_dir: str = "."
    format: str = "csv"

    def validated(self) -> "ExperimentConfig":
        """Check name, parameter names and types; fill defaults. Nothing is computed."""
        exp = get_experiment(self.name)
        if self.format not in ("csv", "json", "both"):
            raise ParamError("format", f"expected csv, json or both, got {self.format!r}")
        if not isinstance(self.seed, int) or isinstance(self.seed, bool) or not 0 <= self.seed <= SEED_MAX:
            raise ParamError("seed", f"expected an integer in [0, 2**64), got {self.seed!r}")
        known = {p.name: p for p in exp.params}
        for key in self.params:
            if key not in known:
                raise ParamError(key, f"not a parameter of {self.name}")
        out = {}
        for p in exp.params:
            raw = self.params.get(p.name)
            if raw is None:
                if p.required:
                    raise ParamError(p.name, "required")
                out[p.name] = p.default
            else:
                out[p.name] = p.coerce(raw)
        return ExperimentConfig(self.name, out, self.seed, self.output_dir, self.format)


@dataclass
class ExperimentReport:
    experiment: str
    params: dict[str, Any]
    seed: int
    version: str
    rows: list[dict]
    summary: dict[str, Any]
    started: float = 0.0
    finished: float = 0.0

    @property
    def timing(self) -> dict[str, float]:
        return {"started": self.started, "finished": self.finished, "elapsed": self.finished - self.started}


def run_experiment(config: ExperimentConfig) -> ExperimentReport:
    cfg = config.validated()
    exp = get_experiment(cfg.name)
    started = time.time()
    try:
        rows, summary = exp.run(dict(cfg.params), cfg.seed)
    except ParamError:
        raise
    except DomainError as exc:
        raise ParamError(_guess_key(str(exc), cfg.params), str(exc)) from exc
    finished = time.time()
    return ExperimentReport(cfg.name, cfg.params, cfg.seed, __version__, rows, summary, started, finished)


def _guess_key(message: str, params: dict) -> str:
    for key in params:
        if key in message.split() or f"{key} " in message or f"{key}=" in message:
            return key
    return next(iter(params), "?")


# --------------------------------------------------------------------- helpers


def _positive(params: dict, *keys: str) -> None:
    for key in keys:
        v = params.get(key)
        if v is not None and v <= 0:
            raise ParamError(key, f"must be positive, got {v}")


def _weight(spec: str) -> WeightFunction:
    try:
        return WeightFunction.parse(spec)
    except DomainError as exc:
        raise ParamError("f", str(exc)) from None


def default_conjecture_y(q: float, x: float, A: float = 1.0) -> float:
    """(log q + log^2 x) (log log q)**A."""
    lq = math.log(q)
    return (lq + math.log(x) ** 2) * math.log(lq) ** A


def _quantiles(values: np.ndarray, qs=(0.5, 0.9, 0.99, 1.0)) -> dict[str, float]:
    if values.size == 0:
        return {f"q{int(round(100 * p))}": float("nan") for p in qs}
    return {f"q{int(round(100 * p))}": float(np.quantile(values, p)) for p in qs}


# ------------------------------------------------------------------ experiments


@register(
    "moment-verify",
    "character-average moment against the divisor-count side",
    Param("q", int, required=True),
    Param("x", float, required=True),
    Param("k", int, required=True),
    Param("f", str, "unit", help="weight: unit, moebius, divisor, ..."),
)
def _moment_verify(p, seed):
    _positive(p, "q", "x", "k")
    f = _weight(p["f"])
    cm = moments.moment_character_side(p["k"], p["x"], p["q"], f)
    div = moments.moment_divisor_side(p["k"], p["x"], p["q"], f)
    if cm.exact:
        equal = cm.value == div
    else:
        equal = abs(float(cm.value) - float(div)) <= 1e-9 * max(1.0, abs(float(div)))
    cv = int(cm.value) if cm.exact and getattr(cm.value, "denominator", 1) == 1 else float(cm.value)
    row = {"q": p["q"], "x": p["x"], "k": p["k"], "f": str(f), "character_side": cv, "divisor_side": div, "equal": bool(equal)}
    summary = {"character_side": cv, "divisor_side": div, "equal": bool(equal), "exact": cm.exact, "identity_in_range": cm.identity_in_range}
    return [row], summary


@register(
    "conjecture1-scan",
    "per-character |sum chi| against the smooth-supported sum Psi(x, y; chi)",
    Param("q", int, required=True),
    Param("x", float, required=True),
    Param("y", float, None, help="defaults to (log q + log^2 x)(log log q)^A"),
    Param("A", float, 1.0),
)
def _conjecture1_scan(p, seed):
    _positive(p, "q", "x", "y", "A")
    q, x = p["q"], p["x"]
    if q < 3:
        raise ParamError("q", "must be >= 3")
    y = p["y"] if p["y"] is not None else default_conjecture_y(q, x, p["A"])
    full = ch.character_sums_all(q, x)
    smooth_part = ch.character_sums_all(q, x, WeightFunction.smooth_indicator(y, x))
    diff = np.abs(full - smooth_part)
    rows = []
    for i in range(1, len(full)):
        rows.append({"index": i, "abs_sum": float(abs(full[i])), "abs_psi": float(abs(smooth_part[i])), "abs_difference": float(diff[i])})
    psi = smooth.psi_count(x, y) if x >= 1 else 0
    llq = math.log(math.log(q))
    threshold = psi / llq**2
    exceptions = int(np.sum(diff[1:] > threshold))
    summary = {
        "y": y,
        "psi": psi,
        "threshold": threshold,
        "exceptions": exceptions,
        "allowed_exceptions": q ** (1 - 1 / math.log(x)) if x > 1 else float(q),
        "characters": len(rows),
        **{f"difference_{k}": v for k, v in _quantiles(diff[1:]).items()},
    }
    return rows, summary


@register(
    "rho-table",
    "Dickman rho on a grid",
    Param("max_u", float, 10.0),
    Param("step", float, 0.25),
)
def _rho_table(p, seed):
    _positive(p, "max_u", "step")
    if p["max_u"] > smooth.RHO_UMAX:
        raise ParamError("max_u", f"must be <= {smooth.RHO_UMAX}")
    count = int(math.floor(p["max_u"] / p["step"] + 1e-9))
    rows = [{"u": i * p["step"], "rho": smooth.dickman_rho(i * p["step"])} for i in range(count + 1)]
    interp = smooth.dickman_interpolant()
    return rows, {"points": len(rows), "delay_residual": interp.delay_residual(skip=1.0)}


def _regime_shapes(q: int, x: float) -> dict[str, float]:
    lq, lx = math.log(q), math.log(x)
    llq = math.log(lq)
    out = {}
    B = lx / math.log(10 * lq)
    if B >= 1:
        fb = math.floor(B)
        out["shape_t4"] = x ** (0.5 + fb / (2 * B)) / (4 * lx) ** fb
    else:
        out["shape_t4"] = float("nan")
    tau = lx / math.sqrt(lq * llq) if llq > 0 else float("nan")
    if llq > 0:
        eta = tau + 1 / tau
        arg = eta * tau
        out["shape_t5"] = math.sqrt(x) * math.exp((1 + math.log(arg)) / eta * math.sqrt(lq / llq))
        out["k_t5"] = max(1, int(1 / eta * math.sqrt(lq / llq)))
        out["shape_t6"] = math.sqrt(x) * tau ** (lq / lx) if tau > 0 else float("nan")
    else:
        out["shape_t5"] = out["shape_t6"] = float("nan")
        out["k_t5"] = 1
    k7 = max(1, int(lq / lx))
    out["k_t7"] = k7
    out["shape_t7"] = math.sqrt(x) * lq ** ((k7 - 1) ** 2 / (2 * k7))
    return out


@register(
    "delta-table",
    "Delta(x, q) with the moment lower bound and predicted regime shapes",
    Param("q", int, required=True),
    Param("x_max", float, None, help="defaults to q"),
    Param("points", int, 12),
    Param("f", str, "unit"),
)
def _delta_table(p, seed):
    _positive(p, "q", "x_max", "points")
    q = p["q"]
    if q < 3:
        raise ParamError("q", "must be >= 3")
    f = _weight(p["f"])
    x_max = p["x_max"] if p["x_max"] is not None else float(q)
    xs = sorted({max(2, int(round(v))) for v in np.geomspace(2, max(2.0, x_max), p["points"])})
    table = ch.character_sum_table(q, xs, f)
    rows = []
    for x, sums in zip(xs, table):
        k = max(1, int(math.log(q) / math.log(x)))
        bound, diag = moments.delta_lower_bound(q, x, k, f, sums=sums)
        row = {
            "x": x,
            "delta": diag.delta_max,
            "witness_index": diag.witness_index,
            "k": k,
            "moment_bound": bound,
            "sqrt_x": math.sqrt(x),
            "delta_over_sqrt_x": diag.delta_max / math.sqrt(x),
        }
        row.update(_regime_shapes(q, x))
        rows.append(row)
    return rows, {"q": q, "points": len(rows), "max_delta_over_sqrt_x": max(r["delta_over_sqrt_x"] for r in rows)}


@register(
    "paley-search",
    "tail sums sum_{n<=|D|/N} (D/n) over negative D in the splitting class",
    Param("q", float, required=True),
    Param("N", float, 2.0),
    Param("y", float, 5.0),
)
def _paley_search(p, seed):
    _positive(p, "q")
    if p["N"] < 2:
        raise ParamError("N", "must be >= 2")
    if p["y"] < 2:
        raise ParamError("y", "must be >= 2")
    rows = realchar.tail_sum_experiment(p["q"], p["N"], p["y"])
    if rows:
        best = max(rows, key=lambda r: (r["paley_ratio"], -abs(r["D"])))
        summary = {"count": len(rows), "max_paley_ratio": best["paley_ratio"], "argmax_D": best["D"], "max_normalized": max(r["normalized"] for r in rows)}
    else:
        summary = {"count": 0, "max_paley_ratio": None, "argmax_D": None, "max_normalized": None}
    return rows, summary


@register(
    "polya-residual",
    "truncated Fourier expansion of sum_{n<=x} chi(n) against direct summation",
    Param("q", int, required=True),
    Param("x", float, None, help="defaults to q/4"),
    Param("H", int, None, help="defaults to q"),
)
def _polya_residual(p, seed):
    _positive(p, "q", "x", "H")
    q = p["q"]
    x = p["x"] if p["x"] is not None else math.floor(q / 4)
    H = p["H"] if p["H"] is not None else q
    indices = [chi.index for chi in ch.character_group(q) if ch.is_primitive(chi)]
    if not indices:
        raise ParamError("q", f"no primitive character mod {q}")
    results = polya.polya_residuals(q, x, H, indices)
    rows = []
    for i, r in zip(indices, results):
        rows.append({"index": i, "expansion": r.expansion, "direct": r.direct, "residual": r.residual, "bound": r.bound, "ratio": r.residual / r.bound})
    worst = max(r["ratio"] for r in rows)
    return rows, {"characters": len(rows), "max_ratio": worst, "within_slack_12": worst <= 12.0}


@register(
    "poisson-harness",
    "Poisson identity, smoothed-sum chain and smoothed moment bound",
    Param("q", int, required=True),
    Param("r", int, 4),
    Param("N", int, 1),
    Param("k", int, 1),
)
def _poisson_harness(p, seed):
    _positive(p, "q", "r", "N", "k")
    q, r, N, k = p["q"], p["r"], p["N"], p["k"]
    X = Fraction(q, r * N)
    chars = ch.primitive_characters(q, parity=1)
    if not chars:
        raise ParamError("q", f"no primitive even character mod {q}")
    rows = []
    for chi in chars:
        if chi.is_principal:
            continue
        chk = polya.poisson_identity_check(chi, X, r)
        chain = polya.smoothed_sum_chain(chi, N, r)
        rows.append(
            {
                "index": chi.index,
                "X": float(X),
                "lhs": chk.lhs,
                "rhs": chk.rhs,
                "gap": chk.gap,
                "method": chk.method,
                "smoothed": chain["smoothed"],
                "max_partial": chain["max_partial"],
                "chain_holds": chain["holds"],
            }
        )
    summary = {
        "characters": len(rows),
        "max_gap": max((row["gap"] for row in rows), default=0.0),
        "chain_holds": all(row["chain_holds"] for row in rows),
    }
    if r % 2 == 0:
        try:
            bound, details = polya.smoothed_moment_bound(q, N, r, k)
            summary.update({"moment_bound": bound, "measured_max": details["measured_max"], "k_max": details["k_max"], "ratio": details["ratio"]})
        except DomainError as exc:
            summary.update({"moment_bound": None, "moment_bound_note": str(exc), "k_max": polya.moment_constraint(q, N, r)})
    return rows, summary


@register(
    "theorem9-search",
    "scan the splitting class for a large real character sum versus Psi(x, y)",
    Param("q", float, required=True),
    Param("x", float, required=True),
    Param("y", float, None, help="defaults to (1/3) log q"),
    Param("sign", str, "both"),
)
def _theorem9_search(p, seed):
    _positive(p, "q", "x")
    y = p["y"] if p["y"] is not None else math.log(p["q"]) / 3
    if y < 2:
        raise ParamError("y", f"must be >= 2, got {y:g}")
    if p["sign"] not in ("+", "-", "both"):
        raise ParamError("sign", "expected +, - or both")
    res = realchar.theorem9_search(p["q"], p["x"], y, p["sign"])
    row = {
        "q": p["q"],
        "x": p["x"],
        "y": y,
        "best_D": res.best_D,
        "best_sum": res.best_sum,
        "target": res.target,
        "achieved": res.achieved,
        "scanned": res.scanned,
    }
    summary = {"achieved": res.achieved, "class_ok": res.class_ok, "smooth_ok": res.smooth_ok, "scanned": res.scanned}
    return [row], summary


@register(
    "round-census",
    "pi(x, y) census against the Hardy-Ramanujan and Pomerance shapes",
    Param("x", float, required=True),
    Param("y_max", int, 8),
)
def _round_census(p, seed):
    _positive(p, "x", "y_max")
    if p["x"] < 3:
        raise ParamError("x", "must be >= 3")
    N = int(p["x"])
    omega, _ = arith.omega_sieve(N)
    counts = np.bincount(omega[1:], minlength=p["y_max"] + 1)
    rows = []
    for y in range(1, p["y_max"] + 1):
        hr = smooth.hardy_ramanujan_bound(N, y)
        pom = smooth.pomerance_shape(N, y)
        c = int(counts[y]) if y < len(counts) else 0
        rows.append({"y": y, "count": c, "hardy_ramanujan": hr, "ratio_hr": c / hr, "pomerance": pom, "ratio_pomerance": c / pom if pom == pom and pom else float("nan")})
    return rows, {"x": N, "max_ratio_hr": max(r["ratio_hr"] for r in rows), "hr_holds": all(r["ratio_hr"] <= 1 for r in rows)}


@register(
    "model-tail",
    "random-model moment of the non-smooth part against Psi(x,y)(k log y log^2 x / y)^(1/2)",
    Param("x", float, required=True),
    Param("y", float, required=True),
    Param("k", int, 1),
    Param("samples", int, 20000),
)
def _model_tail(p, seed):
    _positive(p, "x", "y", "k", "samples")
    if p["samples"] < 100:
        raise ParamError("samples", "must be >= 100")
    x, y, k = p["x"], p["y"], p["k"]
    if x < 2 or y < 2:
        raise ParamError("x", "x and y must be >= 2")
    mean, se = moments.model_tail_moment(k, x, y, p["samples"], seed)
    psi = smooth.psi_count(x, y)
    shape = psi * math.sqrt(k * math.log(y) * math.log(x) ** 2 / y)
    root = mean ** (1 / (2 * k))
    row = {"x": x, "y": y, "k": k, "moment": mean, "stderr": se, "root": root, "psi": psi, "shape": shape, "ratio": root / shape if shape else float("nan")}
    return [row], {"ratio": row["ratio"]}


@register(
    "moment-bracket",
    "squarefree and full divisor-side moments against the log-power shape",
    Param("x", float, required=True),
    Param("k_max", int, 4),
)
def _moment_bracket(p, seed):
    _positive(p, "x", "k_max")
    if p["x"] < 2:
        raise ParamError("x", "must be >= 2")
    rows = [moments.moment_bracket(k, p["x"]) for k in range(1, p["k_max"] + 1)]
    return rows, {"ordered": all(r["ordered"] for r in rows), "max_C": max(r["C"] for r in rows)}


@register(
    "real-delta",
    "Delta over real characters, q <= |D| <= 2q, as a curve in x",
    Param("q", float, required=True),
    Param("x_max", int, 100),
    Param("sign", str, "both"),
)
def _real_delta(p, seed):
    _positive(p, "q", "x_max")
    if p["q"] < 3:
        raise ParamError("q", "must be >= 3")
    if p["sign"] not in ("+", "-", "both"):
        raise ParamError("sign", "expected +, - or both")
    curve = realchar.real_delta_curve(p["q"], range(1, p["x_max"] + 1), p["sign"])
    rows = [{"x": x, "value": v, "witness": D} for x, v, D in curve]
    return rows, {"points": len(rows), "max_value": max(r["value"] for r in rows)}
