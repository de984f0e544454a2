"""Ideal polytropic gas algebra.

Pressure, entropy and characteristic speeds for p = R*theta/v, together with
the relative-entropy kernel Phi(z) = z - ln z - 1.  Scalar functions take a
:class:`GasParams` and a :class:`ThermoState`; the ``*_of`` variants work on
plain floats or numpy arrays and are what the field-level code uses.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np

Family = Literal["minus", "plus"]


def family_sign(family: Family) -> int:
    if family == "minus":
        return -1
    if family == "plus":
        return 1
    raise ValueError(f"family must be 'minus' or 'plus', got {family!r}")


def _check_finite(**values):
    for name, value in values.items():
        if not math.isfinite(value):
            raise ValueError(f"{name} must be finite, got {value!r}")


@dataclass(frozen=True)
class GasParams:
    """Physical constants of the gas.  ``c_nu`` is derived, never stored."""

    R: float = 1.0
    gamma: float = 5.0 / 3.0
    mu: float = 1.0
    kappa: float = 1.0
    A: float = 1.0

    def __post_init__(self):
        _check_finite(R=self.R, gamma=self.gamma, mu=self.mu,
                      kappa=self.kappa, A=self.A)
        for name in ("R", "mu", "kappa", "A"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.gamma <= 1:
            raise ValueError("gamma must exceed 1")

    @property
    def c_nu(self) -> float:
        return self.R / (self.gamma - 1.0)


@dataclass(frozen=True)
class ThermoState:
    v: float
    u: float
    theta: float

    def __post_init__(self):
        _check_finite(v=self.v, u=self.u, theta=self.theta)
        if self.v <= 0:
            raise ValueError(f"specific volume must be positive, got {self.v}")
        if self.theta <= 0:
            raise ValueError(f"temperature must be positive, got {self.theta}")

    def shifted(self, du: float) -> "ThermoState":
        return ThermoState(self.v, self.u + du, self.theta)


def pressure_of(g: GasParams, v, theta):
    return g.R * theta / v


def entropy_of(g: GasParams, v, theta):
    return g.c_nu * np.log(g.R * theta / g.A) + g.R * np.log(v)


def theta_on_isentrope(g: GasParams, v, s):
    """Temperature at volume ``v`` on the isentrope of entropy ``s``."""
    return (g.A / g.R) * np.exp((g.gamma - 1.0) * s / g.R) * v ** (1.0 - g.gamma)


def pressure(g: GasParams, s: ThermoState) -> float:
    return g.R * s.theta / s.v


def entropy(g: GasParams, s: ThermoState) -> float:
    return (g.R / (g.gamma - 1.0)) * math.log(g.R * s.theta / g.A) + g.R * math.log(s.v)


def sound_speed(g: GasParams, s: ThermoState) -> float:
    """Lagrangian characteristic speed sqrt(gamma*p/v) = sqrt(gamma*R*theta)/v."""
    return math.sqrt(g.gamma * g.R * s.theta) / s.v


def lam(g: GasParams, family: Family, v, s):
    """Characteristic speed lambda_family(v, s); accepts arrays for ``v``."""
    sign = family_sign(family)
    v_arr = np.asarray(v, dtype=float)
    if np.any(v_arr <= 0):
        raise ValueError("lambda requires v > 0")
    out = sign * np.sqrt(g.A * g.gamma * v_arr ** (-g.gamma - 1.0)
                         * np.exp((g.gamma - 1.0) * s / g.R))
    return float(out) if out.ndim == 0 else out


def phi_kernel(z):
    """Relative-entropy kernel z - ln z - 1 (scalar or array, z > 0)."""
    z_arr = np.asarray(z, dtype=float)
    if np.any(~(z_arr > 0)):
        raise ValueError("phi_kernel requires z > 0")
    d = z_arr - 1.0
    # log1p keeps the quadratic behaviour near z = 1 accurate
    near = np.abs(d) < 0.5
    log_z = np.where(near, np.log1p(np.where(near, d, 0.0)), np.log(z_arr))
    out = d - log_z
    return float(out) if out.ndim == 0 else out
