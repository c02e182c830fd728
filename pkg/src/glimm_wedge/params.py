"""Model constants and the physical <-> scaled maps of the similarity law.

The scaled variables are defined by

    x = x_s,  y = tau * y_s,  u = U_inf (1 + tau^2 u_s),  v = U_inf tau v_s,
    rho = rho_inf rho_s,

so a slender wedge of half-angle ``theta`` becomes the straight line
``y_s = b0 x_s`` and the only surviving free-stream parameter is
``a_inf = tau * M_inf``.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Any, Iterable, Mapping

from .errors import ConfigError, DegenerateScaling, UnsortedFamily

GAMMA_ONE_EPS = 1e-10
"""Below this value of |gamma - 1| the isothermal (logarithmic) limits are used."""


@dataclass(frozen=True)
class GasParams:
    """Scaled model constants plus numerical tolerances.

    Parameters
    ----------
    gamma : float
        Adiabatic exponent, in [1, 2].
    a_inf : float
        Similarity parameter ``tau * M_inf`` (> 0).
    tau : float
        Slenderness (>= 0). ``tau = 0`` selects the small-disturbance limit.
    b0 : float
        Scaled slope of the wedge surface (< 0).
    rho_floor : float
        Densities at or below this value count as vacuum.
    tol_root : float
        Absolute tolerance of scalar root finds, in invariant units.
    tol_quad : float
        Absolute tolerance of the invariant quadrature.
    """

    gamma: float
    a_inf: float
    tau: float
    b0: float
    rho_floor: float = 1e-8
    tol_root: float = 1e-12
    tol_quad: float = 1e-10

    def __post_init__(self) -> None:
        for name in ("gamma", "a_inf", "tau", "b0", "rho_floor", "tol_root", "tol_quad"):
            value = getattr(self, name)
            if not isinstance(value, (int, float)) or not math.isfinite(value):
                raise ConfigError(f"{name} must be a finite number, got {value!r}")
            object.__setattr__(self, name, float(value))
        if not 1.0 <= self.gamma <= 2.0:
            raise ConfigError(f"gamma must lie in [1, 2], got {self.gamma}")
        if self.a_inf <= 0.0:
            raise ConfigError(f"a_inf must be positive, got {self.a_inf}")
        if self.tau < 0.0:
            raise ConfigError(f"tau must be nonnegative, got {self.tau}")
        if self.tau > 0.0 and self.a_inf <= self.tau:
            # a_inf = tau * M_inf, so this is the statement M_inf > 1.
            raise ConfigError(
                f"a_inf/tau is the free-stream Mach number and must exceed 1 "
                f"(a_inf={self.a_inf}, tau={self.tau})"
            )
        if self.b0 >= 0.0:
            raise ConfigError(f"b0 must be negative, got {self.b0}")
        if self.rho_floor <= 0.0:
            raise ConfigError(f"rho_floor must be positive, got {self.rho_floor}")
        if self.tol_root <= 0.0 or self.tol_quad <= 0.0:
            raise ConfigError("tolerances must be positive")

    @property
    def isothermal(self) -> bool:
        return abs(self.gamma - 1.0) < GAMMA_ONE_EPS

    @property
    def smallness_scale(self) -> float:
        """The combination ``gamma - 1 + tau^2`` that controls all interaction errors."""
        return self.gamma - 1.0 + self.tau * self.tau

    def with_tau(self, tau: float) -> "GasParams":
        return replace(self, tau=tau)

    def to_dict(self) -> dict[str, float]:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "GasParams":
        required = ("gamma", "a_inf", "tau", "b0")
        for key in required:
            if key not in data:
                raise ConfigError(f"missing config key: {key}")
        known = {f for f in cls.__dataclass_fields__}
        kwargs = {k: data[k] for k in known if k in data}
        return cls(**kwargs)


def load_params(path: str | Path) -> GasParams:
    """Read a JSON config file holding (at least) the GasParams keys."""
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"config {path} must hold a JSON object")
    return GasParams.from_dict(data)


@dataclass(frozen=True)
class PhysicalSetup:
    """Free stream and wedge in physical units."""

    mach_inf: float
    theta_wedge: float
    u_inf: float = 1.0
    rho_inf: float = 1.0
    K: float = field(init=False)

    def __post_init__(self) -> None:
        if self.mach_inf <= 1.0:
            raise ConfigError(f"mach_inf must exceed 1, got {self.mach_inf}")
        if self.theta_wedge <= 0.0:
            raise ConfigError(f"theta_wedge must be positive, got {self.theta_wedge}")
        if self.rho_inf <= 0.0:
            raise ConfigError(f"rho_inf must be positive, got {self.rho_inf}")
        object.__setattr__(self, "K", self.mach_inf * self.theta_wedge)


def scaled_from_physical(setup: PhysicalSetup, tau: float, gamma: float = 1.4, **tolerances: float) -> GasParams:
    """Scaled constants for a physical setup at slenderness ``tau``.

    The wedge slope is identified as ``b0 = -theta / tau``; this is only used
    by demos, scaled runs take ``b0`` directly from their configuration.
    """
    if tau <= 0.0:
        raise DegenerateScaling("the physical map needs tau > 0; tau = 0 is only reached as a limit")
    return GasParams(
        gamma=gamma,
        a_inf=tau * setup.mach_inf,
        tau=tau,
        b0=-setup.theta_wedge / tau,
        **tolerances,
    )


def physical_fields(rho_s: float, v_s: float, u_s: float, setup: PhysicalSetup, tau: float) -> tuple[float, float, float]:
    """Map a scaled state (and its reconstructed ``u_s``) back to physical ``(rho, u, v)``."""
    rho = setup.rho_inf * rho_s
    u = setup.u_inf * (1.0 + tau * tau * u_s)
    v = setup.u_inf * tau * v_s
    return rho, u, v


def scaled_from_fields(rho: float, u: float, v: float, setup: PhysicalSetup, tau: float) -> tuple[float, float, float]:
    """Inverse of :func:`physical_fields` for ``tau > 0``."""
    if tau <= 0.0:
        raise DegenerateScaling("inverse scaling needs tau > 0")
    return rho / setup.rho_inf, (u / setup.u_inf - 1.0) / (tau * tau), v / (setup.u_inf * tau)


def tau_family(a_inf: float, gamma: float, b0: float, taus: Iterable[float], **tolerances: float) -> list[GasParams]:
    """GasParams sharing ``(gamma, a_inf, b0)`` along a decreasing list of ``tau``."""
    taus = [float(t) for t in taus]
    if any(b >= a for a, b in zip(taus, taus[1:])):
        raise UnsortedFamily(f"taus must be strictly decreasing, got {taus}")
    return [GasParams(gamma=gamma, a_inf=a_inf, tau=t, b0=b0, **tolerances) for t in taus]
