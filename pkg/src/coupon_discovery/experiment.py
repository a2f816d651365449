"""Experiment descriptions and the table-producing runners behind the CLI.

An experiment is a JSON object validated against
``schema/experiment.schema.json``. Example, the two-known-elements noisy
setup::

    {"M": 4, "prior": {"kind": "binomial", "p": 0.2},
     "channel": {"kind": "symmetric", "r": 0.1},
     "initial_set": [1, 2], "T": 50, "n_runs": 500, "seed": 42}
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from typing import Any, Dict, List, Optional, Tuple, Union

import jsonschema
import numpy as np

from . import analytic, fit as fitting
from .channels import (
    EstimateChannel,
    ObservationModel,
    effective_pmf,
    explicit_channel,
    map_induced_channel,
    symmetric_channel,
)
from .errors import DiscoveryError, ValidationError
from .model import (
    KnownSet,
    Pmf,
    QualityVector,
    make_binomial_prior,
    make_explicit_prior,
    make_uniform_prior,
)
from .simulate import SimulationConfig, simulate_ensemble
from .table import Table, from_columns, numeric_column

DEFAULT_T = 50
DEFAULT_N_RUNS = 500
SWEEPABLE = ("r", "p", "rho0", "M")


@lru_cache(maxsize=1)
def load_schema() -> dict:
    text = resources.files(__package__).joinpath("schema/experiment.schema.json").read_text("utf-8")
    return json.loads(text)


def _path(parts) -> str:
    out = "$"
    for p in parts:
        out += f"[{p}]" if isinstance(p, int) else f".{p}"
    return out


@dataclass(frozen=True)
class ExperimentSpec:
    M: int
    prior: Dict[str, Any] = field(default_factory=lambda: {"kind": "uniform"})
    channel: Dict[str, Any] = field(default_factory=lambda: {"kind": "none"})
    initial_set: Optional[Tuple[int, ...]] = None
    rho0: Optional[float] = None
    quality: Union[None, str, Tuple[float, ...]] = None
    T: int = DEFAULT_T
    n_runs: Optional[int] = None
    seed: int = 0
    workers: int = 1
    sweep: Optional[Tuple[str, Tuple[float, ...]]] = None
    outputs: Tuple[Dict[str, str], ...] = ()

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentSpec":
        validator = jsonschema.Draft202012Validator(load_schema())
        err = jsonschema.exceptions.best_match(validator.iter_errors(data))
        if err is not None:
            raise ValidationError(f"{_path(err.absolute_path)}: {err.message}")
        sweep = data.get("sweep")
        spec = cls(
            M=data["M"],
            prior=dict(data.get("prior", {"kind": "uniform"})),
            channel=dict(data.get("channel", {"kind": "none"})),
            initial_set=tuple(data["initial_set"]) if "initial_set" in data else None,
            rho0=data.get("rho0"),
            quality=(data["quality"] if isinstance(data.get("quality"), str)
                     else tuple(data["quality"]) if "quality" in data else None),
            T=data.get("T", DEFAULT_T),
            n_runs=data.get("n_runs"),
            seed=data.get("seed", 0),
            workers=data.get("workers", 1),
            sweep=(sweep["name"], tuple(sweep["values"])) if sweep else None,
            outputs=tuple(dict(o) for o in data.get("outputs", ())),
        )
        spec.validate()
        return spec

    @classmethod
    def from_json_file(cls, path) -> "ExperimentSpec":
        try:
            with open(path, encoding="utf-8") as fh:
                data = json.load(fh)
        except OSError as exc:
            raise ValidationError(f"{path}: {exc.strerror}") from None
        except json.JSONDecodeError as exc:
            raise ValidationError(f"{path}: line {exc.lineno}: {exc.msg}") from None
        return cls.from_dict(data)

    def to_dict(self) -> dict:
        d: Dict[str, Any] = {"M": self.M, "prior": self.prior, "channel": self.channel, "T": self.T,
                             "seed": self.seed, "workers": self.workers}
        if self.initial_set is not None:
            d["initial_set"] = list(self.initial_set)
        if self.rho0 is not None:
            d["rho0"] = self.rho0
        if self.quality is not None:
            d["quality"] = self.quality if isinstance(self.quality, str) else list(self.quality)
        if self.n_runs is not None:
            d["n_runs"] = self.n_runs
        if self.sweep is not None:
            d["sweep"] = {"name": self.sweep[0], "values": list(self.sweep[1])}
        if self.outputs:
            d["outputs"] = [dict(o) for o in self.outputs]
        return d

    def replace(self, **changes) -> "ExperimentSpec":
        """Copy with fields overridden, re-validated through the schema."""
        d = self.to_dict()
        for k, v in changes.items():
            if v is None:
                d.pop(k, None)
            else:
                d[k] = v
        if "initial_set" in changes and changes["initial_set"] is not None:
            d.pop("rho0", None)
        if "rho0" in changes and changes["rho0"] is not None:
            d.pop("initial_set", None)
        return ExperimentSpec.from_dict(d)

    # semantic checks the schema cannot express
    def validate(self) -> None:
        if self.initial_set is not None and self.rho0 is not None:
            raise ValidationError("$: give either initial_set or rho0, not both")
        prior = self.prior_pmf()
        self.channel_matrix(prior)
        self.initial()
        self.quality_vector(prior)
        if self.sweep is not None:
            name, values = self.sweep
            if name == "r" and self.channel["kind"] not in ("none", "symmetric"):
                raise ValidationError(f"$.sweep.name: cannot sweep r with a {self.channel['kind']} channel")
            if name == "p" and self.prior["kind"] != "binomial":
                raise ValidationError(f"$.sweep.name: cannot sweep p with a {self.prior['kind']} prior")
            if name == "M":
                if self.prior["kind"] == "explicit":
                    raise ValidationError("$.sweep.name: cannot sweep M with an explicit prior")
                if self.channel["kind"] not in ("none", "symmetric"):
                    raise ValidationError(f"$.sweep.name: cannot sweep M with a {self.channel['kind']} channel")
                if isinstance(self.quality, tuple):
                    raise ValidationError("$.sweep.name: cannot sweep M with an explicit quality vector")
                if self.rho0 is None:
                    raise ValidationError("$.sweep.name: sweeping M needs rho0 to define the initial set")
            for i, v in enumerate(values):
                try:
                    self.at(name, v)
                except DiscoveryError as exc:
                    raise ValidationError(f"$.sweep.values[{i}]: {exc}") from None

    def at(self, name: str, value: float) -> "ExperimentSpec":
        """This experiment with one sweep parameter fixed to ``value``."""
        if name == "r":
            return self.replace(channel={"kind": "symmetric", "r": value}, sweep=None)
        if name == "p":
            return self.replace(prior={"kind": "binomial", "p": value}, sweep=None)
        if name == "rho0":
            return self.replace(rho0=value, sweep=None)
        if name == "M":
            if value != int(value):
                raise ValidationError(f"M must be an integer, got {value!r}")
            return self.replace(M=int(value), sweep=None)
        raise ValidationError(f"$.sweep.name: unknown sweep parameter {name!r}")

    def prior_pmf(self) -> Pmf:
        kind = self.prior["kind"]
        if kind == "uniform":
            return make_uniform_prior(self.M)
        if kind == "binomial":
            return make_binomial_prior(self.M, self.prior["p"])
        w = self.prior["weights"]
        if len(w) != self.M:
            raise ValidationError(f"$.prior.weights: has {len(w)} entries, expected M = {self.M}")
        try:
            return make_explicit_prior(w)
        except ValidationError as exc:
            raise ValidationError(f"$.prior.weights: {exc}") from None

    def channel_matrix(self, prior: Pmf) -> EstimateChannel:
        kind = self.channel["kind"]
        if kind == "none":
            return EstimateChannel.identity(self.M)
        if kind == "symmetric":
            return symmetric_channel(self.M, self.channel["r"])
        key = "matrix" if kind == "explicit" else "likelihood"
        rows = self.channel[key]
        if len(rows) != self.M:
            raise ValidationError(f"$.channel.{key}: has {len(rows)} rows, expected M = {self.M}")
        try:
            if kind == "explicit":
                return explicit_channel(rows)
            return map_induced_channel(prior, ObservationModel.from_matrix(rows))
        except ValidationError as exc:
            raise ValidationError(f"$.channel.{key}: {exc}") from None

    def initial(self) -> KnownSet:
        if self.rho0 is not None:
            k = self.rho0 * self.M
            if abs(k - round(k)) > 1e-9:
                raise ValidationError(f"$.rho0: rho0 * M = {k!r} is not an integer count")
            return KnownSet.of(self.M, range(1, int(round(k)) + 1))
        members = self.initial_set or ()
        bad = [m for m in members if m > self.M]
        if bad:
            raise ValidationError(f"$.initial_set: indices {bad} exceed M = {self.M}")
        return KnownSet.of(self.M, members)

    def quality_vector(self, prior: Pmf) -> Optional[QualityVector]:
        if self.quality is None:
            return None
        if self.quality == "aligned":
            return QualityVector.aligned(prior)
        if self.quality == "anti_aligned":
            return QualityVector.anti_aligned(prior)
        if len(self.quality) != self.M:
            raise ValidationError(f"$.quality: has {len(self.quality)} entries, expected M = {self.M}")
        return QualityVector.from_values(self.quality)

    def resolved(self):
        """``(prior, channel, p_tilde, initial, quality)`` for this experiment."""
        prior = self.prior_pmf()
        channel = self.channel_matrix(prior)
        return prior, channel, effective_pmf(prior, channel), self.initial(), self.quality_vector(prior)


def _analytic_columns(spec: ExperimentSpec):
    _, _, pt, init, q = spec.resolved()
    size = analytic.expected_size(pt, init, spec.T).values
    cols = {"expected_size": size, "expected_fraction": size / spec.M}
    if q is not None:
        cols["expected_quality"] = analytic.expected_quality(pt, q, init, spec.T).values
    return cols


def run_analytic(spec: ExperimentSpec) -> Table:
    """Closed-form curves for ``t = 0..T``; one column group per sweep value when sweeping."""
    t = list(range(spec.T + 1))
    if spec.sweep is None:
        cols = _analytic_columns(spec)
        return from_columns(["t", *cols], [t, *[c.tolist() for c in cols.values()]])
    name, values = spec.sweep
    names, data = ["t"], [t]
    for v in values:
        for col, vals in _analytic_columns(spec.at(name, v)).items():
            names.append(f"{col}[{name}={v!r}]")
            data.append(vals.tolist())
    return from_columns(names, data)


def _config(spec: ExperimentSpec, n_runs: int) -> SimulationConfig:
    prior, channel, _, init, q = spec.resolved()
    return SimulationConfig(prior, channel, init, spec.T, n_runs, spec.seed, q)


def run_simulate(spec: ExperimentSpec, workers: Optional[int] = None) -> Table:
    if spec.sweep is not None:
        raise ValidationError("$.sweep: the simulate command takes no sweep; use the sweep command")
    n_runs = spec.n_runs if spec.n_runs is not None else DEFAULT_N_RUNS
    stats = simulate_ensemble(_config(spec, n_runs), workers or spec.workers)
    ana = _analytic_columns(spec)
    names = ["t", "mc_mean_size", "mc_stderr_size", "analytic_size"]
    cols = [list(range(spec.T + 1)), stats.mean_size.tolist(), stats.stderr_size.tolist(),
            ana["expected_size"].tolist()]
    if stats.mean_quality is not None:
        names += ["mc_mean_quality", "mc_stderr_quality", "analytic_quality"]
        cols += [stats.mean_quality.tolist(), stats.stderr_quality.tolist(), ana["expected_quality"].tolist()]
    return from_columns(names, cols)


def run_sweep(spec: ExperimentSpec, workers: Optional[int] = None) -> Table:
    """Long-format table, one block of ``t = 0..T`` rows per sweep value.

    Monte Carlo columns appear only when the experiment sets ``n_runs``;
    every sweep value reuses the same master seed.
    """
    if spec.sweep is None:
        raise ValidationError("$.sweep: the sweep command needs a sweep")
    name, values = spec.sweep
    with_mc = spec.n_runs is not None
    has_q = spec.quality is not None
    columns = ["sweep_name", "sweep_value", "t", "analytic_size"]
    if has_q:
        columns.append("analytic_quality")
    if with_mc:
        columns += ["mc_mean_size", "mc_stderr_size"]
        if has_q:
            columns += ["mc_mean_quality", "mc_stderr_quality"]
    rows: List[list] = []
    for v in values:
        sub = spec.at(name, v)
        ana = _analytic_columns(sub)
        stats = simulate_ensemble(_config(sub, spec.n_runs), workers or spec.workers) if with_mc else None
        for t in range(sub.T + 1):
            row = [name, v, t, float(ana["expected_size"][t])]
            if has_q:
                row.append(float(ana["expected_quality"][t]))
            if stats is not None:
                row += [float(stats.mean_size[t]), float(stats.stderr_size[t])]
                if has_q:
                    row += [float(stats.mean_quality[t]), float(stats.stderr_quality[t])]
            rows.append(row)
    return Table(columns, rows)


@dataclass(frozen=True)
class FitReport:
    fit: fitting.GrowthFit
    implied: Optional[fitting.ImpliedParameters]
    column: str
    n_points: int

    def as_dict(self) -> dict:
        d = {"column": self.column, "n_points": self.n_points, **self.fit.as_dict()}
        if self.implied is not None:
            d.update(M_est=self.implied.M_est, rho0_est=self.implied.rho0_est,
                     rho0_clamped=self.implied.clamped)
        return d

    def lines(self) -> List[str]:
        return [f"{k}: {v!r}" if isinstance(v, float) else f"{k}: {v}" for k, v in self.as_dict().items()]


def series_from_table(table: Table, column: Optional[str] = None, source: str = "<csv>") -> np.ndarray:
    """``(t, value)`` pairs from a table with a ``t`` column.

    Without an explicit ``column`` the ``value`` column is used, or failing
    that the first column after ``t``.
    """
    if "t" not in table.columns:
        raise ValidationError(f"{source}: header needs a 't' column, got {table.columns}")
    if column is None:
        others = [c for c in table.columns if c != "t"]
        if "value" in table.columns:
            column = "value"
        elif others:
            column = others[0]
        else:
            raise ValidationError(f"{source}: no value column besides 't'")
    elif column not in table.columns:
        raise ValidationError(f"{source}: no column named {column!r}; have {table.columns}")
    t = numeric_column(table, "t", source)
    v = numeric_column(table, column, source)
    return np.column_stack([t, v]) if t else np.empty((0, 2))


def run_fit(table: Table, model_kind: str = fitting.SATURATING_EXPONENTIAL,
            capacity_hint: Optional[float] = None, column: Optional[str] = None,
            source: str = "<csv>") -> FitReport:
    series = series_from_table(table, column, source)
    chosen = column or ("value" if "value" in table.columns else [c for c in table.columns if c != "t"][0])
    result = fitting.fit_growth(series, model_kind, capacity_hint)
    implied = None
    if result.model_kind == fitting.SATURATING_EXPONENTIAL and result.converged:
        implied = fitting.implied_model_parameters(result)
    return FitReport(result, implied, chosen, int(series.shape[0]))


def spec_from_overrides(base: Optional[ExperimentSpec], overrides: Dict[str, Any]) -> ExperimentSpec:
    """Apply flag overrides (already keyed by schema field) on top of a config."""
    d = base.to_dict() if base is not None else {}
    for k, v in overrides.items():
        if k == "initial_set":
            d.pop("rho0", None)
        if k == "rho0":
            d.pop("initial_set", None)
        d[k] = v
    return ExperimentSpec.from_dict(d)


def parse_sweep(text: str) -> Dict[str, Any]:
    """``"r=0,0.1,0.2"`` to a sweep object."""
    name, sep, vals = text.partition("=")
    if not sep:
        raise ValidationError(f"--sweep: expected NAME=V1,V2,..., got {text!r}")
    try:
        values = [float(v) for v in vals.split(",") if v.strip()]
    except ValueError:
        raise ValidationError(f"--sweep: non-numeric value in {vals!r}") from None
    return {"name": name.strip(), "values": values}
