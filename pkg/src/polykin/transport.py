"""Transport-coefficient parameter pipeline for polytropic gases.

Converts the dimensionless specific heat to the internal-structure
exponent alpha, extracts the kernel exponent zeta from the temperature
dependence of shear viscosity or thermal conductivity, evaluates the
Prandtl number from reference measurements, and derives the admissible
L^p integrability range. The bundled reference tables (five diatomic
gases at two pressures) are reproduced cell by cell.
"""

from __future__ import annotations

import json
import math
import os
import warnings
from dataclasses import dataclass, field
from importlib import resources

import numpy as np

from .constants import K_B
from .kernel import rho_q

__all__ = [
    "GasSpec",
    "TransportDataset",
    "FitResult",
    "FeasiblePRange",
    "TableCell",
    "TableReport",
    "alpha_from_cv",
    "cv_from_alpha",
    "fit_power_law",
    "prandtl_from_measurements",
    "feasible_p_range",
    "rho_q_consistent",
    "load_tables",
    "reproduce_tables",
]


@dataclass(frozen=True)
class GasSpec:
    """Reference measurements for one gas at the reference temperature T0.

    ``mu0`` is the shear viscosity in uPa.s and ``kappa0`` the thermal
    conductivity in mW/(m.K), the units usual for gas-phase tabulations.
    """

    name: str
    m: float  # molecular mass [kg]
    c_v_hat: float  # dimensionless specific heat at T0
    mu0: float  # shear viscosity at T0 [uPa.s]
    kappa0: float  # thermal conductivity at T0 [mW/(m.K)]
    T0: float = 300.0

    def __post_init__(self):
        if not self.m > 0.0 or not self.mu0 > 0.0 or not self.kappa0 > 0.0 or not self.T0 > 0.0:
            raise ValueError(f"{self.name}: mass, mu0, kappa0, T0 must be positive")
        if not self.c_v_hat > 1.5:
            raise ValueError(f"{self.name}: c_v_hat must exceed 3/2, got {self.c_v_hat}")


@dataclass(frozen=True)
class TransportDataset:
    """(T, value) measurement series of one transport coefficient."""

    T: np.ndarray
    value: np.ndarray
    kind: str  # 'viscosity' or 'conductivity'
    pressure: str = ""

    def __post_init__(self):
        object.__setattr__(self, "T", np.asarray(self.T, dtype=float))
        object.__setattr__(self, "value", np.asarray(self.value, dtype=float))
        if self.kind not in {"viscosity", "conductivity"}:
            raise ValueError(f"kind must be 'viscosity' or 'conductivity', got {self.kind!r}")
        if self.T.ndim != 1 or self.T.shape != self.value.shape:
            raise ValueError("T and value must be 1D arrays of equal length")
        if np.any(np.diff(self.T) <= 0.0):
            raise ValueError("temperatures must be strictly increasing")
        if np.any(self.T <= 0.0) or np.any(self.value <= 0.0):
            raise ValueError("temperatures and values must be positive")


def alpha_from_cv(c_v_hat: float):
    """(alpha, delta) from the dimensionless specific heat.

    alpha = c_v_hat - 5/2 and delta = 2(alpha + 1) counts the internal
    degrees of freedom.
    """
    if not c_v_hat > 1.5:
        raise ValueError(f"c_v_hat must exceed 3/2, got {c_v_hat}")
    alpha = c_v_hat - 2.5
    return alpha, 2.0 * (alpha + 1.0)


def cv_from_alpha(alpha: float) -> float:
    """Inverse of :func:`alpha_from_cv`."""
    if not alpha > -1.0:
        raise ValueError(f"alpha must exceed -1, got {alpha}")
    return alpha + 2.5


@dataclass(frozen=True)
class FitResult:
    """Power-law fit value(T) = value(T0) (T/T0)^(1 - zeta/2)."""

    zeta: float
    K_scale: float  # fitted value at T0 over the reference measurement
    r_squared: float
    value_at_T0: float
    zeta_in_range: bool  # True when zeta lies in (0, 2]


def fit_power_law(data: TransportDataset, T0: float = 300.0, reference: float | None = None) -> FitResult:
    """Least-squares fit of log(value) against log(T/T0).

    The slope equals 1 - zeta/2 for both viscosity and conductivity.
    ``reference`` is the measured value at T0 used to normalize K_scale;
    when omitted K_scale is the fitted value at T0 itself. A zeta outside
    (0, 2] is reported as-is and flagged.
    """
    if len(data.T) < 3:
        raise ValueError("need at least 3 data points")
    if not T0 > 0.0:
        raise ValueError("T0 must be positive")
    x = np.log(data.T / T0)
    y = np.log(data.value)
    if np.ptp(x) == 0.0:
        raise ValueError("degenerate data: constant temperature")
    slope, intercept = np.polyfit(x, y, 1)
    zeta = 2.0 * (1.0 - slope)
    value_at_t0 = math.exp(intercept)
    resid = y - (slope * x + intercept)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid**2)) / ss_tot if ss_tot > 0.0 else 1.0
    k_scale = value_at_t0 / reference if reference is not None else value_at_t0
    return FitResult(
        zeta=float(zeta),
        K_scale=float(k_scale),
        r_squared=r2,
        value_at_T0=value_at_t0,
        zeta_in_range=bool(0.0 < zeta <= 2.0),
    )


def prandtl_from_measurements(gas: GasSpec, k_B: float = K_B, si_units: bool = True) -> float:
    """Prandtl number (alpha + 7/2)(k_B/m)(mu0/kappa0).

    With ``si_units`` the stored uPa.s / mW/(m.K) values are converted to
    Pa.s and W/(m.K); disable it when the gas record carries nondimensional
    values. A result far outside the gas-kinetic range triggers a warning
    (likely unit mismatch).
    """
    alpha, _ = alpha_from_cv(gas.c_v_hat)
    mu = gas.mu0 * 1e-6 if si_units else gas.mu0
    kappa = gas.kappa0 * 1e-3 if si_units else gas.kappa0
    pr = (alpha + 3.5) * (k_B / gas.m) * mu / kappa
    if si_units and not 0.1 < pr < 3.0:
        warnings.warn(
            f"{gas.name}: Prandtl number {pr:.3g} outside the plausible range; check units",
            stacklevel=2,
        )
    return float(pr)


@dataclass(frozen=True)
class FeasiblePRange:
    """Upper limit p_bar of the admissible L^p range and what binds it."""

    p_bar: float  # may be inf
    binding: tuple  # subset of ('i', 'ii', 'p-alpha')
    candidates: dict = field(default_factory=dict)


def feasible_p_range(alpha: float, zeta: float) -> FeasiblePRange:
    """Admissible range p in (1, p_bar) of propagated L^p integrability.

    Restrictions: (i) for alpha < zeta/2, p < (1 + zeta/2)/(zeta/2 - alpha);
    (ii) for alpha < -1/2, p < -1/(2 alpha + 1); and the standing moment
    condition p * alpha > -1, i.e. p < -1/alpha for alpha < 0. p_bar is
    the binding minimum, inf when nothing binds.
    """
    if not alpha > -1.0:
        raise ValueError("alpha must exceed -1")
    if not 0.0 < zeta <= 2.0:
        raise ValueError("zeta must lie in (0, 2]")
    candidates = {}
    if alpha < 0.5 * zeta:
        candidates["i"] = (1.0 + 0.5 * zeta) / (0.5 * zeta - alpha)
    if alpha < -0.5:
        candidates["ii"] = -1.0 / (2.0 * alpha + 1.0)
    if alpha < 0.0:
        candidates["p-alpha"] = -1.0 / alpha
    if not candidates:
        return FeasiblePRange(p_bar=math.inf, binding=(), candidates={})
    p_bar = min(candidates.values())
    binding = tuple(k for k, v in candidates.items() if v == p_bar)
    return FeasiblePRange(p_bar=float(p_bar), binding=binding, candidates=candidates)


def rho_q_consistent(alpha: float, zeta: float, p_bar: float, margin: float = 0.01) -> bool:
    """Check p_bar against the finite/infinite transition of rho_q.

    rho_q with q = p/(p-1) must be finite just below p_bar and infinite
    just above. Only meaningful when restriction (i) or (ii) binds; the
    standing moment condition is not visible to rho_q.
    """
    if not math.isfinite(p_bar):
        return math.isfinite(rho_q(alpha, zeta, 1.0000001))
    p_lo = (1.0 - margin) * p_bar
    p_hi = (1.0 + margin) * p_bar
    q_of = lambda p: p / (p - 1.0)
    return math.isfinite(rho_q(alpha, zeta, q_of(p_lo))) and not math.isfinite(
        rho_q(alpha, zeta, q_of(p_hi))
    )


# ---------------------------------------------------------------------------
# bundled reference tables


def load_tables(path: str | None = None) -> dict:
    """Load the bundled gas-parameter tables.

    Resolution order: explicit ``path``, then a ``tables.json`` inside the
    directory named by the POLYKIN_DATA_DIR environment variable, then the
    packaged data file.
    """
    if path is None:
        data_dir = os.environ.get("POLYKIN_DATA_DIR")
        if data_dir:
            path = os.path.join(data_dir, "tables.json")
    if path is not None:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    ref = resources.files("polykin").joinpath("data/tables.json")
    return json.loads(ref.read_text(encoding="utf-8"))


@dataclass(frozen=True)
class TableCell:
    label: str
    expected: float
    computed: float
    passed: bool

    @property
    def diff(self) -> float:
        return abs(self.computed - self.expected)


@dataclass(frozen=True)
class TableReport:
    cells: tuple
    skipped: tuple
    tolerance: float

    @property
    def n_pass(self) -> int:
        return sum(c.passed for c in self.cells)

    @property
    def n_fail(self) -> int:
        return len(self.cells) - self.n_pass

    @property
    def all_pass(self) -> bool:
        return self.n_fail == 0

    def to_dict(self) -> dict:
        return {
            "tolerance": self.tolerance,
            "n_pass": self.n_pass,
            "n_fail": self.n_fail,
            "cells": [
                {
                    "label": c.label,
                    "expected": c.expected,
                    "computed": c.computed,
                    "diff": c.diff,
                    "pass": c.passed,
                }
                for c in self.cells
            ],
            "skipped": list(self.skipped),
        }


def reproduce_tables(tables: dict | None = None, tolerance: float = 2e-3) -> TableReport:
    """Recompute delta and p_bar for every non-empty reference cell.

    The published inputs are 4-decimal roundings, hence the default
    absolute tolerance of 2e-3. Cells without data are skipped with a
    note. Restriction (ii) never binds for these gases (all alpha above
    -1/2); that is asserted as a data check.
    """
    tables = tables if tables is not None else load_tables()
    cells = []
    skipped = []
    for pressure, block in tables["pressures"].items():
        for gas, alpha in block["alpha"].items():
            if alpha <= -0.5:
                raise ValueError(f"{gas} ({pressure}): alpha <= -1/2, restriction (ii) would bind")
            _, delta = alpha_from_cv(cv_from_alpha(alpha))
            cells.append(
                TableCell(
                    label=f"{pressure}/{gas}/delta",
                    expected=block["delta"][gas],
                    computed=delta,
                    passed=abs(delta - block["delta"][gas]) <= tolerance,
                )
            )
        for scenario in ("i", "ii"):
            for gas, zeta in block["zeta"][scenario].items():
                expected = block["p_bar"][scenario].get(gas)
                label = f"{pressure}/{gas}/({scenario})/p_bar"
                if zeta is None or expected is None:
                    skipped.append(f"{label}: no data")
                    continue
                res = feasible_p_range(block["alpha"][gas], zeta)
                cells.append(
                    TableCell(
                        label=label,
                        expected=expected,
                        computed=res.p_bar,
                        passed=abs(res.p_bar - expected) <= tolerance,
                    )
                )
    return TableReport(cells=tuple(cells), skipped=tuple(skipped), tolerance=tolerance)
