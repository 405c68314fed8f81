"""Scenario configuration, parameter sweeps, and figure-data emission.

A ``SystemConfig`` mirrors the JSON config schema one-to-one; the dB →
linear SNR conversion happens only at this boundary so the core modules
stay in linear units.  ``run_sweep`` evaluates a chosen set of evaluators
over a grid and writes one CSV; ``run_figure`` does the same for the
bundled presets 2..10 (each preset pins the fixed parameters of one
standard study: EC vs SNR, total EC of pairing sets, EC vs delay
exponent, EC vs error probability, and delay-violation curves).

Every emitted number is formatted with shortest round-trip ``repr``, so
parsing the CSV back recovers the in-memory doubles exactly and identical
(config, seed) runs produce byte-identical files.
"""

from __future__ import annotations

import dataclasses
import json
import os
from dataclasses import dataclass
from math import log, sqrt
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import DomainError
from .effective_capacity import (
    ECEstimate,
    McRequest,
    ec_strong_asymptote,
    ec_strong_closed,
    ec_strong_high_snr,
    ec_weak_asymptote,
    ec_weak_closed,
    ec_weak_high_snr,
    mc_inner_moments,
)
from .delay import DelayTarget, delay_floor, delay_violation
from .fading import FadingConfig
from .pairing import PairEcTable, PairingSet, NomaPair
from .rate import FblParams, PairPower

__all__ = [
    "SystemConfig",
    "SweepSpec",
    "run_sweep",
    "run_figure",
    "FIGURE_IDS",
    "SEED_ENV_VAR",
    "default_seed",
]

SEED_ENV_VAR = "NOMA_FBL_SEED"

EVALUATORS = ("mc", "closed", "high_snr", "asymptotic")
AXES = ("rho_db", "theta", "epsilon")


def default_seed() -> int:
    """Default stream seed, overridable through the environment."""
    return int(os.environ.get(SEED_ENV_VAR, "1"))


@dataclass(frozen=True)
class SystemConfig:
    """Full scenario description; field names match the JSON schema."""

    num_users: int = 10
    weak_rank: int = 2
    strong_rank: int = 8
    alpha_weak: float = 0.8
    alpha_strong: float = 0.2
    blocklength: int = 400
    error_prob: float = 1e-5
    theta_weak: float = 0.01
    theta_strong: float = 0.01
    rho_db: float = 15.0
    seed: Optional[int] = None
    n_samples: int = 1_000_000

    def __post_init__(self) -> None:
        if self.seed is None:
            object.__setattr__(self, "seed", default_seed())
        # assemble the component types once so their invariants all run
        self.power
        self.fbl
        self.fading
        if not 1 <= self.weak_rank < self.strong_rank <= self.num_users:
            raise DomainError(
                f"need 1 <= weak_rank < strong_rank <= V, got "
                f"({self.weak_rank}, {self.strong_rank}) with V={self.num_users}"
            )
        if self.theta_weak <= 0.0 or self.theta_strong <= 0.0:
            raise DomainError("delay exponents must be > 0")
        if self.n_samples < 1:
            raise DomainError(f"n_samples must be >= 1, got {self.n_samples}")

    @property
    def rho_linear(self) -> float:
        return 10.0 ** (self.rho_db / 10.0)

    @property
    def power(self) -> PairPower:
        return PairPower(self.alpha_weak, self.alpha_strong)

    @property
    def fbl(self) -> FblParams:
        return FblParams(self.blocklength, self.error_prob)

    @property
    def fading(self) -> FadingConfig:
        return FadingConfig(self.num_users, self.rho_linear)

    def replace(self, **overrides) -> "SystemConfig":
        bad = set(overrides) - {f.name for f in dataclasses.fields(self)}
        if bad:
            raise DomainError(f"unknown config fields: {sorted(bad)}")
        return dataclasses.replace(self, **overrides)

    @classmethod
    def from_dict(cls, data: dict) -> "SystemConfig":
        return cls().replace(**data)

    @classmethod
    def from_json(cls, path: str) -> "SystemConfig":
        with open(path, "r", encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))


@dataclass(frozen=True)
class SweepSpec:
    """One swept axis, its grid, the evaluators to run, and the output path."""

    axis: str
    grid: tuple[float, ...]
    evaluators: tuple[str, ...]
    output_path: str

    def __post_init__(self) -> None:
        if self.axis not in AXES:
            raise DomainError(f"axis must be one of {AXES}, got {self.axis!r}")
        if len(self.grid) < 1:
            raise DomainError("grid must be non-empty")
        diffs = np.diff(self.grid)
        if len(self.grid) > 1 and not (np.all(diffs > 0) or np.all(diffs < 0)):
            raise DomainError("grid must be strictly monotone")
        unknown = set(self.evaluators) - set(EVALUATORS)
        if unknown:
            raise DomainError(f"unknown evaluators: {sorted(unknown)}")
        if not self.evaluators:
            raise DomainError("evaluator set must be non-empty")


def _fmt(x: float) -> str:
    return repr(float(x))


def _write_csv(path: str, header: Sequence[str], rows: Sequence[Sequence[float]]) -> str:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_fmt(x) for x in row))
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("\n".join(lines) + "\n")
    return path


def _apply_axis(cfg: SystemConfig, axis: str, value: float) -> SystemConfig:
    if axis == "rho_db":
        return cfg.replace(rho_db=float(value))
    if axis == "theta":
        return cfg.replace(theta_weak=float(value), theta_strong=float(value))
    return cfg.replace(error_prob=float(value))


def _mc_both(cfg: SystemConfig, seed) -> tuple[ECEstimate, ECEstimate]:
    """Monte-Carlo (strong, weak) estimates from one shared sample pass."""
    if cfg.error_prob == 1.0:
        z = ECEstimate(0.0, "mc", ci_half_width=0.0, samples=cfg.n_samples)
        return z, z
    reqs = [
        McRequest(cfg.strong_rank, "strong", cfg.theta_strong),
        McRequest(cfg.weak_rank, "weak", cfg.theta_weak),
    ]
    moments = mc_inner_moments(reqs, cfg.power, cfg.fbl, cfg.fading, cfg.n_samples, seed)
    out = []
    for (mean, var), theta in zip(moments, (cfg.theta_strong, cfg.theta_weak)):
        tn = theta * cfg.blocklength
        half = 1.96 * sqrt(var / cfg.n_samples) / (mean * tn)
        out.append(ECEstimate(-log(mean) / tn, "mc", ci_half_width=half, samples=cfg.n_samples))
    return out[0], out[1]


def _eval_point(cfg: SystemConfig, evaluators: Sequence[str], seed) -> dict[str, float]:
    """All requested (user, evaluator) values at one grid point."""
    out: dict[str, float] = {}
    if "mc" in evaluators:
        strong, weak = _mc_both(cfg, seed)
        out["strong_mc"] = strong.value
        out["strong_mc_hw"] = strong.ci_half_width or 0.0
        out["weak_mc"] = weak.value
        out["weak_mc_hw"] = weak.ci_half_width or 0.0
    if "closed" in evaluators:
        out["strong_closed"] = ec_strong_closed(
            cfg.strong_rank, cfg.num_users, cfg.power, cfg.fbl, cfg.theta_strong, cfg.rho_linear
        ).value
        out["weak_closed"] = ec_weak_closed(
            cfg.weak_rank, cfg.num_users, cfg.power, cfg.fbl, cfg.theta_weak, cfg.rho_linear
        ).value
    if "high_snr" in evaluators:
        out["strong_high_snr"] = ec_strong_high_snr(
            cfg.strong_rank, cfg.num_users, cfg.power, cfg.fbl, cfg.theta_strong, cfg.rho_linear
        ).value
        out["weak_high_snr"] = ec_weak_high_snr(
            cfg.weak_rank, cfg.num_users, cfg.power, cfg.fbl, cfg.theta_weak, cfg.rho_linear
        ).value
    if "asymptotic" in evaluators:
        out["strong_asymptotic"] = ec_strong_asymptote(cfg.fbl, cfg.theta_strong).value
        out["weak_asymptotic"] = ec_weak_asymptote(cfg.power, cfg.fbl, cfg.theta_weak).value
    return out


def _sweep_columns(evaluators: Sequence[str]) -> list[str]:
    cols = []
    for ev in EVALUATORS:
        if ev not in evaluators:
            continue
        for user in ("strong", "weak"):
            cols.append(f"{user}_{ev}")
            if ev == "mc":
                cols.append(f"{user}_mc_hw")
    return cols


def run_sweep(cfg: SystemConfig, spec: SweepSpec) -> str:
    """Evaluate the spec over its grid and write one CSV; returns the path.

    Deterministic for a fixed config seed: every grid point draws from its
    own spawned stream, so rows are independent of evaluation order.
    """
    cols = _sweep_columns(spec.evaluators)
    seeds = np.random.SeedSequence(cfg.seed).spawn(len(spec.grid))
    rows = []
    for i, value in enumerate(spec.grid):
        point_cfg = _apply_axis(cfg, spec.axis, value)
        try:
            values = _eval_point(point_cfg, spec.evaluators, seeds[i])
        except Exception as exc:
            raise type(exc)(f"{exc} [at {spec.axis}={value!r}]") from exc
        rows.append([value] + [values[c] for c in cols])
    return _write_csv(spec.output_path, [spec.axis] + cols, rows)


# ----------------------------------------------------------------------
# Figure presets
# ----------------------------------------------------------------------

def _grid(start: float, stop: float, step: float) -> tuple[float, ...]:
    n = int(round((stop - start) / step))
    return tuple(start + k * step for k in range(n + 1))


_FIG3_SETS = (
    ("tec_16_25_34", ((1, 6), (2, 5), (3, 4))),
    ("tec_14_25_36", ((1, 4), (2, 5), (3, 6))),
    ("tec_12_34_56", ((1, 2), (3, 4), (5, 6))),
)


def _figure2(cfg: SystemConfig, out: str) -> str:
    """EC of both users vs transmit SNR: Monte-Carlo, closed, high-SNR."""
    spec = SweepSpec("rho_db", _grid(0.0, 40.0, 2.0), ("mc", "closed", "high_snr"), out)
    return run_sweep(cfg, spec)


def _figure3(cfg: SystemConfig, out: str) -> str:
    """Total EC of three pairing sets vs transmit SNR, V = 6, shared draws."""
    cfg = cfg.replace(num_users=6, weak_rank=1, strong_rank=6)
    grid = _grid(0.0, 40.0, 4.0)
    seeds = np.random.SeedSequence(cfg.seed).spawn(len(grid))
    sets = [
        (name, PairingSet(tuple(NomaPair(a, b, cfg.power) for a, b in pairs)))
        for name, pairs in _FIG3_SETS
    ]
    header = ["rho_db"]
    for name, _ in sets:
        header += [name, f"{name}_hw"]
    rows = []
    for i, rho_db in enumerate(grid):
        pt = cfg.replace(rho_db=rho_db)
        table = PairEcTable(6, pt.fbl, pt.theta_weak, pt.rho_linear, pt.n_samples, seeds[i], pt.power)
        row = [rho_db]
        for _, ps in sets:
            row += [table.total(ps), table.total_ci_half_width(ps)]
        rows.append(row)
    return _write_csv(out, header, rows)


def _figure4(cfg: SystemConfig, out: str) -> str:
    """EC of both users vs delay exponent at 15 and 20 dB, ε = 1e-6."""
    cfg = cfg.replace(error_prob=1e-6)
    grid = tuple(np.logspace(-3.0, 0.0, 25))
    header = ["theta"]
    rho_list = (15.0, 20.0)
    for rho_db in rho_list:
        tag = f"rho{rho_db:g}db"
        for user in ("strong", "weak"):
            header += [f"{user}_closed_{tag}", f"{user}_mc_{tag}", f"{user}_mc_{tag}_hw"]
    seeds = np.random.SeedSequence(cfg.seed).spawn(len(grid) * len(rho_list))
    rows = []
    for i, theta in enumerate(grid):
        row = [theta]
        for j, rho_db in enumerate(rho_list):
            pt = cfg.replace(rho_db=rho_db, theta_weak=float(theta), theta_strong=float(theta))
            strong_mc, weak_mc = _mc_both(pt, seeds[i * len(rho_list) + j])
            vals = {
                "strong": (
                    ec_strong_closed(pt.strong_rank, pt.num_users, pt.power, pt.fbl, theta, pt.rho_linear).value,
                    strong_mc,
                ),
                "weak": (
                    ec_weak_closed(pt.weak_rank, pt.num_users, pt.power, pt.fbl, theta, pt.rho_linear).value,
                    weak_mc,
                ),
            }
            for user in ("strong", "weak"):
                closed, mc = vals[user]
                row += [closed, mc.value, mc.ci_half_width or 0.0]
        rows.append(row)
    return _write_csv(out, header, rows)


_EPS_GRID = (1e-7, 1e-6, 1e-5, 1e-4, 1e-3, 1e-2, 0.05, 0.1, 0.2, 0.3, 0.5, 0.7, 0.9, 0.99)


def _figure_eps(cfg: SystemConfig, out: str, user: str) -> str:
    """EC of one user vs transmission error probability for several SNRs."""
    rho_list = (5.0, 10.0, 15.0, 20.0)
    header = ["epsilon"]
    for rho_db in rho_list:
        tag = f"rho{rho_db:g}db"
        header += [f"{user}_closed_{tag}", f"{user}_mc_{tag}", f"{user}_mc_{tag}_hw"]
    seeds = np.random.SeedSequence(cfg.seed).spawn(len(_EPS_GRID) * len(rho_list))
    rows = []
    for i, eps in enumerate(_EPS_GRID):
        row = [eps]
        for j, rho_db in enumerate(rho_list):
            pt = cfg.replace(rho_db=rho_db, error_prob=eps)
            strong_mc, weak_mc = _mc_both(pt, seeds[i * len(rho_list) + j])
            if user == "strong":
                closed = ec_strong_closed(pt.strong_rank, pt.num_users, pt.power, pt.fbl, pt.theta_strong, pt.rho_linear)
                mc = strong_mc
            else:
                closed = ec_weak_closed(pt.weak_rank, pt.num_users, pt.power, pt.fbl, pt.theta_weak, pt.rho_linear)
                mc = weak_mc
            row += [closed.value, mc.value, mc.ci_half_width or 0.0]
        rows.append(row)
    return _write_csv(out, header, rows)


def _figure_delay_theta(cfg: SystemConfig, out: str, user: str) -> str:
    """Delay-violation probability vs delay exponent, D_max = n = 400, ε = 1e-6."""
    cfg = cfg.replace(error_prob=1e-6, blocklength=400)
    target = DelayTarget(d_max=400.0)
    grid = tuple(np.logspace(-3.0, 0.0, 20))
    rho_list = (5.0, 10.0, 15.0, 20.0)
    header = ["theta"] + [f"dv_{user}_rho{r:g}db" for r in rho_list] + ["floor"]
    rows = []
    for theta in grid:
        row = [theta]
        for rho_db in rho_list:
            pt = cfg.replace(rho_db=rho_db, theta_weak=float(theta), theta_strong=float(theta))
            if user == "strong":
                ec = ec_strong_closed(pt.strong_rank, pt.num_users, pt.power, pt.fbl, theta, pt.rho_linear)
            else:
                ec = ec_weak_closed(pt.weak_rank, pt.num_users, pt.power, pt.fbl, theta, pt.rho_linear)
            row.append(delay_violation(ec, theta, target))
        row.append(delay_floor(cfg.fbl, target.d_max))
        rows.append(row)
    return _write_csv(out, header, rows)


def _figure_delay_eps(cfg: SystemConfig, out: str, user: str) -> str:
    """Delay-violation probability vs error probability, D_max = n = 100, 20 dB."""
    cfg = cfg.replace(blocklength=100, rho_db=20.0)
    target = DelayTarget(d_max=100.0)
    grid = (1e-6, 1e-5, 1e-4, 1e-3, 1e-2, 0.05, 0.1, 0.2, 0.3, 0.5)
    theta_list = (0.001, 0.01, 0.1, 1.0)
    header = ["epsilon"] + [f"dv_{user}_theta{t:g}" for t in theta_list] + ["floor"]
    rows = []
    for eps in grid:
        pt_base = cfg.replace(error_prob=eps)
        row = [eps]
        for theta in theta_list:
            pt = pt_base.replace(theta_weak=theta, theta_strong=theta)
            if user == "strong":
                ec = ec_strong_closed(pt.strong_rank, pt.num_users, pt.power, pt.fbl, theta, pt.rho_linear)
            else:
                ec = ec_weak_closed(pt.weak_rank, pt.num_users, pt.power, pt.fbl, theta, pt.rho_linear)
            row.append(delay_violation(ec, theta, target))
        row.append(delay_floor(pt_base.fbl, target.d_max))
        rows.append(row)
    return _write_csv(out, header, rows)


_FIGURES: dict[int, Callable[[SystemConfig, str], str]] = {
    2: _figure2,
    3: _figure3,
    4: _figure4,
    5: lambda cfg, out: _figure_eps(cfg, out, "strong"),
    6: lambda cfg, out: _figure_eps(cfg, out, "weak"),
    7: lambda cfg, out: _figure_delay_theta(cfg, out, "strong"),
    8: lambda cfg, out: _figure_delay_theta(cfg, out, "weak"),
    9: lambda cfg, out: _figure_delay_eps(cfg, out, "strong"),
    10: lambda cfg, out: _figure_delay_eps(cfg, out, "weak"),
}

FIGURE_IDS = tuple(sorted(_FIGURES))


def run_figure(fig_id: int, overrides: Optional[dict] = None, out_path: Optional[str] = None) -> str:
    """Write the CSV for one bundled figure preset; returns the path.

    ``overrides`` accepts any SystemConfig field (n_samples and seed
    included); grid axes and per-figure fixed parameters are baked in.
    """
    if fig_id not in _FIGURES:
        raise DomainError(f"unknown figure id {fig_id}; valid ids are {FIGURE_IDS}")
    cfg = SystemConfig.from_dict(overrides or {})
    out = out_path or f"figure{fig_id}.csv"
    return _FIGURES[fig_id](cfg, out)
