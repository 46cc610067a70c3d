"""Model definitions for the two hyperbolic-parabolic systems.

Both systems are posed in Lagrangian coordinates and moved to a frame
traveling with speed c, so traveling waves become stationary:

  shallow water (St. Venant, turbulent friction):
      tau_t - c tau_x - u_x = 0
      u_t - c u_x + ((2 F^2)^-1 tau^-2)_x = 1 - tau u^2 + nu (tau^-2 u_x)_x

  isentropic gas:
      tau_t - c tau_x - u_x = 0
      u_t - c u_x + p(tau)_x = nu (tau^-1 u_x)_x,   p(tau) = a tau^-gamma

tau > 0 is specific volume (reciprocal fluid height for shallow water), u is
velocity, F the Froude number, nu = 1/Re.

Linearizing the shallow-water system about a stationary wave (tau_bar, u_bar)
gives transport plus the flux coefficient

    alpha = tau_bar^-3 (F^-2 - 2 nu u_bar_x),

so pointwise hyperbolic symmetrizability is exactly alpha > 0, i.e. the slope
bound 2 nu u_bar_x < F^-2.
"""

import enum
import json
from dataclasses import dataclass, field

import numpy as np

from . import spectral


class DomainError(ValueError):
    """Input outside the physical domain (e.g. nonpositive tau)."""


class GridMismatchError(ValueError):
    """Grid functions passed together do not share one grid."""


class SystemKind(str, enum.Enum):
    ST_VENANT = "StVenant"
    ISENTROPIC_GAS = "IsentropicGas"


@dataclass(frozen=True)
class ModelParams:
    """Physical and wave constants shared by all modules.

    speed is the frame speed c; discharge is the integration constant
    q = u_bar + c tau_bar of the profile equations (None until a wave fixes
    it).  gas_gamma and gas_amp parameterize p(tau) = gas_amp * tau^-gas_gamma
    and are only meaningful for the isentropic gas system.
    """

    froude: float = 2.5
    nu: float = 0.1
    speed: float = 0.0
    discharge: float | None = None
    system: SystemKind = SystemKind.ST_VENANT
    gas_gamma: float | None = None
    gas_amp: float | None = None

    def __post_init__(self):
        if self.froude <= 0:
            raise DomainError(f"froude must be positive, got {self.froude}")
        if self.nu <= 0:
            raise DomainError(f"nu must be positive, got {self.nu}")
        if self.system == SystemKind.ISENTROPIC_GAS:
            if self.gas_gamma is None or self.gas_amp is None:
                raise DomainError("isentropic gas requires gas_gamma and gas_amp")
            if self.gas_gamma < 1:
                raise DomainError(f"gas_gamma must be >= 1, got {self.gas_gamma}")
            if self.gas_amp <= 0:
                raise DomainError(f"gas_amp must be positive, got {self.gas_amp}")

    def replace(self, **kwargs):
        data = self.to_dict()
        data.update(kwargs)
        return ModelParams.from_dict(data)

    def pressure(self, tau):
        """Pressure-like flux P(tau) whose gradient enters the u equation."""
        tau = np.asarray(tau, dtype=float)
        if self.system == SystemKind.ST_VENANT:
            return 0.5 * self.froude ** -2 * tau ** -2
        return self.gas_amp * tau ** -self.gas_gamma

    def pressure_prime(self, tau):
        tau = np.asarray(tau, dtype=float)
        if self.system == SystemKind.ST_VENANT:
            return -self.froude ** -2 * tau ** -3
        return -self.gas_amp * self.gas_gamma * tau ** -(self.gas_gamma + 1)

    def viscosity_weight(self, tau):
        """Coefficient g(tau) of u_x inside the viscous term (g u_x)_x."""
        tau = np.asarray(tau, dtype=float)
        if self.system == SystemKind.ST_VENANT:
            return self.nu * tau ** -2
        return self.nu * tau ** -1

    def to_dict(self):
        return {
            "froude": self.froude,
            "nu": self.nu,
            "speed": self.speed,
            "discharge": self.discharge,
            "system": self.system.value,
            "gas_gamma": self.gas_gamma,
            "gas_amp": self.gas_amp,
        }

    def to_json(self):
        return json.dumps(self.to_dict())

    @staticmethod
    def from_dict(data):
        return ModelParams(
            froude=float(data["froude"]),
            nu=float(data["nu"]),
            speed=float(data.get("speed", 0.0)),
            discharge=None if data.get("discharge") is None else float(data["discharge"]),
            system=SystemKind(data.get("system", "StVenant")),
            gas_gamma=None if data.get("gas_gamma") is None else float(data["gas_gamma"]),
            gas_amp=None if data.get("gas_amp") is None else float(data["gas_amp"]),
        )

    @staticmethod
    def from_json(text):
        return ModelParams.from_dict(json.loads(text))


@dataclass(frozen=True)
class State:
    """Pointwise state (tau, u) with tau > 0."""

    tau: float
    u: float

    def __post_init__(self):
        if self.tau <= 0:
            raise DomainError(f"tau must be positive, got {self.tau}")


def equilibrium_velocity(tau0):
    """Velocity of the constant shallow-water equilibrium at volume tau0.

    Balances gravity against turbulent friction, 1 - tau0 u0^2 = 0, on the
    positive branch: u0 = tau0^(-1/2).
    """
    if tau0 <= 0:
        raise DomainError(f"tau0 must be positive, got {tau0}")
    return float(tau0) ** -0.5


def comoving_residual(params, state_fields, time_derivs, period):
    """Pointwise residual of the co-moving system on a shared periodic grid.

    state_fields = (tau, u), time_derivs = (tau_t, u_t) are grid functions on
    one uniform grid over [0, period).  Returns (r1, r2), the residuals of the
    mass and momentum equations.
    """
    tau, u = (np.asarray(a, dtype=float) for a in state_fields)
    tau_t, u_t = (np.asarray(a, dtype=float) for a in time_derivs)
    if not (tau.shape == u.shape == tau_t.shape == u_t.shape):
        raise GridMismatchError("state and time-derivative grids differ")
    if np.any(tau <= 0):
        raise DomainError("tau must be positive everywhere")
    c = params.speed
    d = lambda f: spectral.diff(f, period)
    r1 = tau_t - c * d(tau) - u_x_term(u, period)
    if params.system == SystemKind.ST_VENANT:
        source = 1.0 - tau * u ** 2
    else:
        source = 0.0
    r2 = (
        u_t
        - c * d(u)
        + d(params.pressure(tau))
        - source
        - d(params.viscosity_weight(tau) * d(u))
    )
    return r1, r2


def u_x_term(u, period):
    return spectral.diff(u, period)


def linearization_coefficients(params, tau_bar, u_bar_x):
    """Coefficient alpha of the linearized flux term (alpha * tau)_x.

    alpha = -P'(tau_bar) + g'(tau_bar) u_bar_x, the combination produced by
    linearizing both the pressure gradient and the tau-dependence of the
    viscosity about the background wave.
    """
    tau_bar = np.asarray(tau_bar, dtype=float)
    u_bar_x = np.asarray(u_bar_x, dtype=float)
    if params.system == SystemKind.ST_VENANT:
        return tau_bar ** -3 * (params.froude ** -2 - 2.0 * params.nu * u_bar_x)
    # d/dtau of nu tau^-1 is -nu tau^-2
    return -params.pressure_prime(tau_bar) - params.nu * u_bar_x * tau_bar ** -2


def constant_state_symbol(params, k, tau0=1.0):
    """2x2 Fourier symbol of the linearization about a constant equilibrium.

    For shallow water the equilibrium is (tau0, tau0^(-1/2)); the friction
    terms contribute the zeroth-order block.  The symbol is evaluated in the
    co-moving frame with speed params.speed (real parts are frame
    independent).
    """
    c = params.speed
    ik = 1j * k
    g0 = float(params.viscosity_weight(tau0))
    if params.system == SystemKind.ST_VENANT:
        u0 = equilibrium_velocity(tau0)
        alpha0 = float(tau0 ** -3 * params.froude ** -2)
        fric_tau = u0 ** 2
        fric_u = 2.0 * u0 * tau0
    else:
        alpha0 = float(-params.pressure_prime(tau0))
        fric_tau = 0.0
        fric_u = 0.0
    return np.array(
        [
            [ik * c, ik],
            [ik * alpha0 - fric_tau, ik * c - g0 * k ** 2 - fric_u],
        ],
        dtype=complex,
    )


def constant_state_spectrum(params, wavenumber, tau0=1.0):
    """Eigenvalue pair of the constant-state symbol at one wavenumber."""
    lam = np.linalg.eigvals(constant_state_symbol(params, float(wavenumber), tau0))
    return lam[np.argsort(lam.real)]


GROWTH_TOLERANCE = 1e-10


def is_hydrodynamically_unstable(params, k_max=None, n_k=400, tol=GROWTH_TOLERANCE):
    """Scan wavenumbers for exponential growth of the constant state.

    Returns (unstable, max_growth, argmax_k).  The scan uses a geometric grid
    (plus a parabolic refinement of the maximum) so slim unstable bands near
    onset are resolved; growth below tol counts as neutral.
    """
    if k_max is None:
        # the unstable band of the shallow-water symbol closes by
        # nu k^2 ~ F, so this bound always brackets it
        k_max = 2.0 * np.sqrt(max(params.froude, 1.0) / params.nu)
    ks = np.geomspace(1e-4, k_max, n_k)
    growth = np.array([constant_state_spectrum(params, k)[-1].real for k in ks])
    i = int(np.argmax(growth))
    best_k, best_g = ks[i], growth[i]
    # local parabolic refinement around the grid maximum
    lo = ks[max(i - 1, 0)]
    hi = ks[min(i + 1, n_k - 1)]
    for k in np.linspace(lo, hi, 41):
        g = constant_state_spectrum(params, k)[-1].real
        if g > best_g:
            best_k, best_g = k, g
    return bool(best_g > tol), float(best_g), float(best_k)


def instability_threshold_in_froude(nu=0.1, lo=1.5, hi=2.5, tol=1e-4):
    """Bisect the Froude number at which constant states lose stability."""
    def unstable(f):
        return is_hydrodynamically_unstable(ModelParams(froude=f, nu=nu))[0]

    if unstable(lo) or not unstable(hi):
        raise ValueError("bracket does not straddle the stability boundary")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if unstable(mid):
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)
