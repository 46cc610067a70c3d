"""Periodic traveling-wave profiles by Fourier collocation and damped Newton.

Eliminating u through u_bar = q - c*tau_bar reduces the stationary co-moving
system to one second-order scalar equation for tau_bar,

    nu*c (tau^-2 tau_x)_x + c^2 tau_x + P(tau)_x - 1 + tau (q - c tau)^2 = 0,

discretized on a uniform periodic grid with spectral differentiation.  The
pressure gradient is kept in conservative form P(tau)_x so the reduced
residual agrees with the full two-equation residual to machine precision on
the same grid.

Solver modes
------------
fix_q           unknowns (tau, c), q held; integral phase condition
fix_c           unknowns (tau, q), c held; integral phase condition
fix_cq          unknowns tau only, no phase condition (constant branch)
pin_first_mode  unknowns (tau, c, q); first Fourier mode of tau pinned,
                used to seed small-amplitude waves near onset without
                collapsing onto the constant state
"""

import csv
import io
import json
from dataclasses import dataclass, field, replace

import numpy as np

from . import spectral
from .model import DomainError, ModelParams, SystemKind

POSITIVITY_FLOOR = 1e-6


class ProfileError(RuntimeError):
    pass


class DegenerateSpeedError(ProfileError):
    """c = 0 admits no nontrivial periodic wave; the system degenerates."""


class NoConvergenceError(ProfileError):
    def __init__(self, message, last_tau=None, last_speed=None, last_discharge=None,
                 residual_norm=None):
        super().__init__(message)
        self.last_tau = last_tau
        self.last_speed = last_speed
        self.last_discharge = last_discharge
        self.residual_norm = residual_norm


class PositivityViolationError(NoConvergenceError):
    pass


@dataclass(frozen=True)
class WaveProfile:
    """Converged periodic wave on a uniform grid over [0, period)."""

    grid: np.ndarray
    tau_bar: np.ndarray
    u_bar: np.ndarray
    speed: float
    period: float
    params: ModelParams
    residual_norm: float
    solve_mode: str = "fix_q"

    @property
    def n(self):
        return len(self.grid)

    @property
    def discharge(self):
        return self.params.discharge

    def tau_x(self):
        return spectral.diff(self.tau_bar, self.period)

    def u_x(self):
        return spectral.diff(self.u_bar, self.period)

    def amplitude(self):
        return float(self.tau_bar.max() - self.tau_bar.min())

    def translate(self, shift_points):
        """Shift the profile by an integer number of grid points."""
        return replace(
            self,
            tau_bar=np.roll(self.tau_bar, shift_points),
            u_bar=np.roll(self.u_bar, shift_points),
        )

    def resample(self, n_new):
        tau = spectral.resample(self.tau_bar, n_new)
        u = spectral.resample(self.u_bar, n_new)
        return replace(self, grid=spectral.grid(n_new, self.period), tau_bar=tau, u_bar=u)

    def to_dict(self):
        return {
            "params": self.params.to_dict(),
            "period": self.period,
            "n": self.n,
            "tau_bar": self.tau_bar.tolist(),
            "u_bar": self.u_bar.tolist(),
            "speed": self.speed,
            "residual_norm": self.residual_norm,
            "solve_mode": self.solve_mode,
        }

    def to_json(self):
        return json.dumps(self.to_dict())

    @staticmethod
    def from_dict(data):
        n = int(data["n"])
        period = float(data["period"])
        return WaveProfile(
            grid=spectral.grid(n, period),
            tau_bar=np.asarray(data["tau_bar"], dtype=float),
            u_bar=np.asarray(data["u_bar"], dtype=float),
            speed=float(data["speed"]),
            period=period,
            params=ModelParams.from_dict(data["params"]),
            residual_norm=float(data["residual_norm"]),
            solve_mode=data.get("solve_mode", "fix_q"),
        )

    @staticmethod
    def from_json(text):
        return WaveProfile.from_dict(json.loads(text))

    def to_csv(self):
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["x", "tau_bar", "u_bar"])
        for x, t, u in zip(self.grid, self.tau_bar, self.u_bar):
            writer.writerow([f"{x:.17g}", f"{t:.17g}", f"{u:.17g}"])
        return buf.getvalue()


@dataclass
class ReducedProfileODE:
    """Scalar form of the traveling-wave equations for a given parameter set."""

    params: ModelParams

    def __post_init__(self):
        if self.params.speed == 0.0:
            raise DegenerateSpeedError(
                "c = 0 reduces the system to first order; no nontrivial periodic wave"
            )

    def u_from_tau(self, tau):
        return self.params.discharge - self.params.speed * np.asarray(tau, dtype=float)

    def residual(self, tau, period):
        return _collocation_residual(
            self.params, np.asarray(tau, dtype=float), period,
            self.params.speed, self.params.discharge,
        )


def _collocation_residual(params, tau, period, c, q):
    if np.any(tau <= 0):
        raise DomainError("tau must stay positive")
    d = lambda f: spectral.diff(f, period)
    tau_x = d(tau)
    visc = params.nu * c * d(tau ** -2 * tau_x)
    if params.system == SystemKind.ST_VENANT:
        source = 1.0 - tau * (q - c * tau) ** 2
    else:
        source = np.zeros_like(tau)
    return visc + c ** 2 * tau_x + d(params.pressure(tau)) - source


def full_system_residual(params, tau, u, period, c=None):
    """Residual of both stationary co-moving equations without reduction."""
    c = params.speed if c is None else c
    d = lambda f: spectral.diff(f, period)
    r1 = -c * d(tau) - d(u)
    if params.system == SystemKind.ST_VENANT:
        source = 1.0 - tau * u ** 2
    else:
        source = np.zeros_like(tau)
    r2 = -c * d(u) + d(params.pressure(tau)) - source - d(params.viscosity_weight(tau) * d(u))
    return r1, r2


def reduce_profile_ode(params):
    """Scalar second-order description of the traveling-wave system."""
    return ReducedProfileODE(params)


def _residual_and_jacobian(params, tau, period, c, q, need_dc, need_dq):
    n = len(tau)
    D = spectral.diffmat(n, period)
    tau_x = D @ tau
    r = _collocation_residual(params, tau, period, c, q)

    # d/dtau of nu*c*D(tau^-2 tau_x) + c^2 tau_x + D P(tau) - source
    J = params.nu * c * (D @ (np.diag(tau ** -2) @ D - 2.0 * np.diag(tau ** -3 * tau_x)))
    J += c ** 2 * D
    J += D @ np.diag(params.pressure_prime(tau))
    if params.system == SystemKind.ST_VENANT:
        u = q - c * tau
        J += np.diag(u ** 2 - 2.0 * c * tau * u)

    dc = dq = None
    if need_dc:
        dc = params.nu * (D @ (tau ** -2 * tau_x)) + 2.0 * c * tau_x
        if params.system == SystemKind.ST_VENANT:
            dc += -2.0 * tau ** 2 * (q - c * tau)
    if need_dq:
        if params.system == SystemKind.ST_VENANT:
            dq = 2.0 * tau * (q - c * tau)
        else:
            dq = np.zeros(n)
    return r, J, dc, dq


def solve_profile(params, period, guess, mode="fix_q", tol=1e-10, max_iter=60,
                  phase_ref=None, pin_amplitude=None):
    """Newton solve for a periodic wave; see module docstring for modes.

    guess may be a WaveProfile (its tau, c, q seed the iteration) or an array
    of tau values (c, q then come from params.speed / params.discharge).
    Newton steps are damped by backtracking on the sup-norm of the residual
    with a positivity guard tau >= 1e-6.
    """
    if isinstance(guess, WaveProfile):
        tau = np.array(spectral.resample(guess.tau_bar, guess.n), dtype=float) \
            if guess.period == period else np.array(guess.tau_bar, dtype=float)
        c = guess.speed
        q = guess.discharge
    else:
        tau = np.array(guess, dtype=float)
        c = params.speed
        q = params.discharge
    if q is None:
        raise DomainError("discharge must be set before solving")
    if c == 0.0 and mode != "fix_c":
        raise DegenerateSpeedError("c = 0 admits no nontrivial periodic wave")

    n = len(tau)
    x = spectral.grid(n, period)
    if phase_ref is None:
        phase_ref = tau
    dref = spectral.diff(np.asarray(phase_ref, dtype=float), period)
    cosk = np.cos(2.0 * np.pi * x / period)
    sink = np.sin(2.0 * np.pi * x / period)

    need_dc = mode in ("fix_q", "pin_first_mode")
    need_dq = mode in ("fix_c", "pin_first_mode")

    def assemble(tau, c, q):
        r, J, dc, dq = _residual_and_jacobian(params, tau, period, c, q, need_dc, need_dq)
        rows = [r]
        cols = [J]
        extra_cols = []
        if need_dc:
            extra_cols.append(dc)
        if need_dq:
            extra_cols.append(dq)
        if mode in ("fix_q", "fix_c"):
            rows.append(np.array([np.mean(tau * dref)]))
            phase_row = dref / n
            bottom = [phase_row]
        elif mode == "pin_first_mode":
            re1 = np.mean(tau * cosk)
            im1 = np.mean(tau * sink)
            rows.append(np.array([re1 - pin_amplitude, im1]))
            bottom = [cosk / n, sink / n]
        else:
            bottom = []
        m = len(bottom)
        size = n + len(extra_cols)
        A = np.zeros((n + m, size))
        A[:n, :n] = J
        for j, col in enumerate(extra_cols):
            A[:n, n + j] = col
        for i, row in enumerate(bottom):
            A[n + i, :n] = row
            # constraint rows do not involve c or q
        rhs = np.concatenate(rows)
        return rhs, A

    res_norm = np.inf
    for iteration in range(max_iter):
        rhs, A = assemble(tau, c, q)
        res_norm = float(np.max(np.abs(rhs[:n])))
        cons_norm = float(np.max(np.abs(rhs[n:]))) if len(rhs) > n else 0.0
        if res_norm <= tol and cons_norm <= tol:
            break
        try:
            step = np.linalg.solve(A, -rhs)
        except np.linalg.LinAlgError as exc:
            raise NoConvergenceError(f"singular Newton system: {exc}",
                                     last_tau=tau, last_speed=c, last_discharge=q,
                                     residual_norm=res_norm)
        lam = 1.0
        base = max(res_norm, cons_norm)
        accepted = False
        for _ in range(40):
            tau_new = tau + lam * step[:n]
            if np.min(tau_new) < POSITIVITY_FLOOR:
                lam *= 0.5
                continue
            c_new, q_new = c, q
            j = n
            if need_dc:
                c_new = c + lam * step[j]
                j += 1
            if need_dq:
                q_new = q + lam * step[j]
            try:
                rhs_new, _ = assemble(tau_new, c_new, q_new)
            except DomainError:
                lam *= 0.5
                continue
            if np.max(np.abs(rhs_new)) < base or lam < 2 ** -20:
                tau, c, q = tau_new, c_new, q_new
                accepted = True
                break
            lam *= 0.5
        if not accepted:
            raise PositivityViolationError(
                "Newton step rejected at all damping levels (positivity or stagnation)",
                last_tau=tau, last_speed=c, last_discharge=q, residual_norm=res_norm)
    else:
        raise NoConvergenceError(
            f"no convergence after {max_iter} iterations (residual {res_norm:.3e})",
            last_tau=tau, last_speed=c, last_discharge=q, residual_norm=res_norm)

    final = float(np.max(np.abs(_collocation_residual(params, tau, period, c, q))))
    out_params = params.replace(speed=c, discharge=q)
    return WaveProfile(
        grid=x,
        tau_bar=tau,
        u_bar=q - c * tau,
        speed=c,
        period=period,
        params=out_params,
        residual_norm=final,
        solve_mode=mode,
    )


def onset_froude(period, nu):
    """Froude number at which the constant state sheds a wave of this period."""
    k = 2.0 * np.pi / period
    return 2.0 + nu * k ** 2


def seed_small_amplitude(froude, period, nu=0.1, n=128, eps=0.05):
    """Cosine-seeded wave just above onset, solved with the first mode pinned.

    At onset the neutral mode of the constant state (tau0, u0) = (1, 1) has
    c = 1/F and q = 1 + c; pinning the first Fourier amplitude at eps/2 keeps
    Newton off the constant branch.
    """
    c0 = 1.0 / froude
    params = ModelParams(froude=froude, nu=nu, speed=c0, discharge=1.0 + c0)
    x = spectral.grid(n, period)
    tau0 = 1.0 + eps * np.cos(2.0 * np.pi * x / period)
    return solve_profile(params, period, tau0, mode="pin_first_mode",
                         pin_amplitude=0.5 * eps)


@dataclass
class ContinuationRun:
    parameter_name: str
    values: list = field(default_factory=list)
    profiles: list = field(default_factory=list)
    diagnostics: list = field(default_factory=list)
    success: bool = True

    @property
    def final(self):
        return self.profiles[-1]


def continue_in_parameter(start, target_froude, step=0.05, min_step=1e-4,
                          mode="fix_q", tol=1e-10, max_amplitude_jump=1.0):
    """Natural-parameter continuation of a converged wave in Froude number.

    Failed steps are halved down to min_step; if the floor is reached the run
    is returned with success=False and everything computed so far.  Secant
    prediction is used once two profiles are available.
    """
    run = ContinuationRun(parameter_name="froude")
    run.values.append(start.params.froude)
    run.profiles.append(start)
    run.diagnostics.append({"froude": start.params.froude, "step": 0.0, "halvings": 0})
    f_now = start.params.froude
    direction = np.sign(target_froude - f_now)
    if direction == 0:
        return run
    h = abs(step)
    while (target_froude - f_now) * direction > 1e-12:
        h = min(h, abs(target_froude - f_now))
        halvings = 0
        while True:
            f_try = f_now + direction * h
            prev = run.profiles[-1]
            tau_pred = prev.tau_bar.copy()
            c_pred = prev.speed
            if len(run.profiles) >= 2 and run.values[-1] != run.values[-2]:
                older = run.profiles[-2]
                w = (f_try - run.values[-1]) / (run.values[-1] - run.values[-2])
                tau_pred = prev.tau_bar + w * (prev.tau_bar - older.tau_bar)
                c_pred = prev.speed + w * (prev.speed - older.speed)
            params_try = prev.params.replace(froude=f_try, speed=c_pred)
            try:
                if np.min(tau_pred) < 2 * POSITIVITY_FLOOR:
                    raise PositivityViolationError("predictor lost positivity")
                prof = solve_profile(params_try, prev.period, tau_pred, mode=mode,
                                     tol=tol, phase_ref=prev.tau_bar)
                jump = float(np.max(np.abs(prof.tau_bar - prev.tau_bar)))
                if jump > max_amplitude_jump:
                    raise NoConvergenceError(f"step jump {jump:.3f} too large")
                break
            except ProfileError:
                h *= 0.5
                halvings += 1
                if h < min_step:
                    run.success = False
                    run.diagnostics.append(
                        {"froude": f_try, "step": h, "halvings": halvings,
                         "failed": True})
                    return run
        f_now = f_try
        run.values.append(f_now)
        run.profiles.append(prof)
        run.diagnostics.append({"froude": f_now, "step": direction * h,
                                "halvings": halvings, "sup_jump": jump})
        if halvings == 0:
            h = min(1.6 * h, abs(step))
    return run


def check_mean_identity(profile, f):
    """Period average of f(tau_bar) * u_bar_x; zero for any converged wave.

    f(tau_bar) u_bar_x = -c f(tau_bar) tau_bar_x is a perfect derivative, so
    its mean over one period vanishes; the returned value measures only
    quadrature and resolution error.
    """
    vals = f(profile.tau_bar) * profile.u_x()
    return spectral.mean(vals)
