"""Radial finite-difference solver for the damped wave equation with memory.

The model is

    u_tt - (u_rr + (n-1)/r u_r) + mu/(1+t) u_t = N[u],
    N[u](t) = c_gamma int_0^t (t - tau)^(-gamma) |u(tau)|^p dtau,

solved by an explicit leapfrog scheme with the damping term averaged
over the two outer time levels, which keeps the update explicit and
second order.  The memory source is a product-integration sum over the
stored |u|^p history: the kernel is integrated exactly on every cell
and the history is interpolated piecewise linearly by default.  The
piecewise-constant variant (cell averages) is available for comparison
but loses accuracy O(dt^(2-gamma)) at the kernel singularity, which is
visible in self-convergence studies.

The origin uses the symmetric stencil 2n(u_1 - u_0)/dr^2; the outer
boundary is homogeneous Dirichlet but never reached: the box is sized
for the stencil cone (one cell per step), which contains the physical
cone R + t whenever the CFL bound holds, and the stepper asserts the
cell-count containment at every step.

Beyond the full solver there are two reductions: a Liouville-transformed
mode for mu = 2, where v = (1+t)u solves an undamped wave equation with
a reweighted memory source, and a spatially reduced Volterra model for
the space integral F(t) = int u dx, driven by the same kernel weights
with the p-th power mass replaced by its lower bound from Holder's
inequality on the support cone.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import DataError, DomainError, IntegrityError
from .exponents import ModelParams
from .fractional import _pw_linear_weights

__all__ = [
    "SpaceGrid",
    "MemoryKernel",
    "SolverConfig",
    "SimulationState",
    "RunRecord",
    "OdeTrace",
    "bump_profile",
    "surface_area",
    "memory_source",
    "step",
    "simulate",
    "liouville_mode",
    "ode_model",
]

SCHEMA_VERSION = 1
OUTCOMES = ("completed", "blowup_detected", "cfl_violation")
INTERPOLATIONS = ("linear", "constant")
CFL_LIMIT = 0.9


def surface_area(n: int) -> float:
    """|S^(n-1)|: the factor turning radial integrals into volume integrals."""
    return 2.0 * math.pi ** (n / 2.0) / math.gamma(n / 2.0)


def bump_profile(r: np.ndarray, radius: float) -> np.ndarray:
    """Smooth nonnegative bump (R^2 - r^2)^2 / R^4 supported in [0, R]."""
    scaled = np.clip(1.0 - (r / radius) ** 2, 0.0, None)
    return scaled**2


@dataclass(frozen=True)
class SpaceGrid:
    """Uniform radial grid on [0, r_max] with M nodes."""

    r_max: float
    points: int
    n: int

    def __post_init__(self) -> None:
        if not self.r_max > 0.0:
            raise DomainError(f"radial extent must be > 0, got {self.r_max}")
        if self.points < 16:
            raise DomainError(f"need at least 16 radial nodes, got {self.points}")
        if self.n < 1:
            raise DomainError(f"dimension must be >= 1, got {self.n}")

    @property
    def dr(self) -> float:
        return self.r_max / (self.points - 1)

    @property
    def nodes(self) -> np.ndarray:
        return self.dr * np.arange(self.points)


@dataclass(frozen=True)
class MemoryKernel:
    """Product-integration weights for the kernel (t - tau)^(-gamma).

    near[j]/far[j] weight the newer/older sample of history cell j
    (counted back from the evaluation time); their sum is the exact
    kernel mass of the cell, so the step-m weights add up to
    t_m^(1-gamma)/(1-gamma) exactly.
    """

    gamma: float
    h: float
    steps: int
    interpolation: str
    near: np.ndarray
    far: np.ndarray

    @property
    def c_gamma(self) -> float:
        return 1.0 / math.gamma(1.0 - self.gamma)

    @classmethod
    def build(cls, gamma: float, h: float, steps: int, interpolation: str = "linear") -> "MemoryKernel":
        if not (0.0 < gamma < 1.0):
            raise DomainError(f"kernel order must lie in (0,1), got {gamma}")
        if interpolation not in INTERPOLATIONS:
            raise DomainError(f"unknown interpolation {interpolation!r}, expected one of {INTERPOLATIONS}")
        if not h > 0.0 or steps < 1:
            raise DomainError("kernel needs h > 0 and steps >= 1")
        near, far = _pw_linear_weights(1.0 - gamma, steps, h)
        if interpolation == "constant":
            cell = near + far
            near = 0.5 * cell
            far = 0.5 * cell
        return cls(gamma=gamma, h=h, steps=steps, interpolation=interpolation, near=near, far=far)

    def mass(self, m: int) -> float:
        """Total kernel weight through step m."""
        return float(np.sum(self.near[:m]) + np.sum(self.far[:m]))

    def convolve(self, history: np.ndarray, m: int) -> np.ndarray:
        """c_gamma-weighted kernel sum over history rows 0..m at step m."""
        if m == 0:
            return np.zeros_like(history[0])
        acc = self.far[:m][::-1] @ history[:m]
        acc += self.near[:m][::-1] @ history[1 : m + 1]
        return self.c_gamma * acc


@dataclass(frozen=True)
class SolverConfig:
    """Everything a run needs; the record echoes it for reproducibility."""

    model: ModelParams
    t_end: float
    r_support: float = 1.0
    points: int = 400
    dt_factor: float = 0.5
    u0_scale: float = 1.0
    u1_scale: float = 1.0
    blowup_threshold: float = 1e8
    memory_interpolation: str = "linear"
    memory_enabled: bool = True
    richardson_refine: bool = True
    store_profiles: bool = False

    def __post_init__(self) -> None:
        if not self.t_end > 0.0:
            raise DomainError(f"final time must be > 0, got {self.t_end}")
        if not self.r_support > 0.0:
            raise DomainError(f"support radius must be > 0, got {self.r_support}")
        if not self.dt_factor > 0.0:
            raise DomainError(f"time-step factor must be > 0, got {self.dt_factor}")
        if not self.blowup_threshold > 0.0:
            raise DomainError(f"detection threshold must be > 0, got {self.blowup_threshold}")
        if self.memory_interpolation not in INTERPOLATIONS:
            raise DomainError(f"unknown interpolation {self.memory_interpolation!r}")

    def space_grid(self) -> SpaceGrid:
        # The physical support stays in B_(R+t), but the stencil widens its
        # exact-zero support by one cell per step, i.e. at speed dr/dt.  The
        # box is sized for the stencil cone plus slack, so neither the
        # solution nor its dispersive leak ever reaches the boundary; this is
        # strictly larger than the R + t_end + 2 dr the physical cone needs.
        # r_max = R + t_end/dt_factor + 8 dr, solved with dr = r_max/(M-1).
        m1 = self.points - 1
        r_max = (self.r_support + self.t_end / self.dt_factor) / (1.0 - 8.0 / m1)
        return SpaceGrid(r_max=r_max, points=self.points, n=self.model.n)


@dataclass
class SimulationState:
    """Two time levels plus the |u|^p history the memory source needs."""

    m: int
    t: float
    dt: float
    u_prev: np.ndarray
    u_curr: np.ndarray
    history: np.ndarray  # row i holds |u(t_i, .)|^p
    grid: SpaceGrid

    def history_rows(self) -> np.ndarray:
        return self.history[: self.m + 1]


@dataclass(frozen=True)
class RunRecord:
    """Traces and outcome of one run, all on a shared time axis."""

    config: SolverConfig
    times: np.ndarray
    functional: np.ndarray
    sup_abs: np.ndarray
    energy: np.ndarray
    support_radius: np.ndarray
    lp_mass: np.ndarray
    weighted_derivative: np.ndarray  # (1+t)^mu F' at half steps
    outcome: str
    blowup_time_estimate: float | None
    profiles: np.ndarray | None = None  # (len(times), points) when stored
    schema_version: int = SCHEMA_VERSION

    def __post_init__(self) -> None:
        if self.outcome not in OUTCOMES:
            raise DataError(f"unknown outcome {self.outcome!r}")
        n = len(self.times)
        for name in ("functional", "sup_abs", "energy", "support_radius", "lp_mass"):
            if len(getattr(self, name)) != n:
                raise DataError(f"trace {name} is not aligned with the time axis")
        if self.profiles is not None and len(self.profiles) != n:
            raise DataError("stored profiles are not aligned with the time axis")
        if self.outcome == "blowup_detected" and self.blowup_time_estimate is None:
            raise DataError("blow-up outcome requires a time estimate")


@dataclass(frozen=True)
class OdeTrace:
    """Volterra model output: F on a time grid and its threshold crossing."""

    times: np.ndarray
    values: np.ndarray
    weighted_derivative: np.ndarray
    crossing_time: float | None


def memory_source(state: SimulationState, kernel: MemoryKernel) -> np.ndarray:
    """Memory nonlinearity per radial node at the state's current time."""
    return kernel.convolve(state.history, state.m)


def _laplacian(u: np.ndarray, grid: SpaceGrid) -> np.ndarray:
    dr = grid.dr
    n = grid.n
    out = np.zeros_like(u)
    r = grid.nodes
    out[1:-1] = (u[2:] - 2.0 * u[1:-1] + u[:-2]) / dr**2
    out[1:-1] += (n - 1) / r[1:-1] * (u[2:] - u[:-2]) / (2.0 * dr)
    out[0] = 2.0 * n * (u[1] - u[0]) / dr**2
    out[-1] = 0.0
    return out


def _support_radius(u: np.ndarray, grid: SpaceGrid) -> float:
    idx = np.nonzero(u)[0]
    return float(grid.nodes[idx[-1]]) if idx.size else 0.0


def _assert_cone(u: np.ndarray, grid: SpaceGrid, r_support: float, m: int) -> None:
    # Stencil-width induction: each update widens the exact-zero support by
    # at most one cell, so after m steps it fits in R + m dr + 2 dr.  Zeroing
    # the dispersive leak down to the physical cone R + t + 2 dr instead
    # would cut O(dr)-sized front content every step and is measurably fatal
    # to second-order self-convergence, so the cell-count bound is the one
    # asserted.
    limit = r_support + (m + 2.0) * grid.dr
    radius = _support_radius(u, grid)
    if radius > limit * (1.0 + 1e-12):
        raise IntegrityError(
            f"finite-speed containment violated: support {radius} exceeds {limit} at step {m}"
        )


def _check_support(state: SimulationState, r_support: float) -> None:
    _assert_cone(state.u_curr, state.grid, r_support, state.m)


def step(state: SimulationState, kernel: MemoryKernel, config: SolverConfig) -> SimulationState:
    """One leapfrog update with time-centered damping.

    (1+c) u_next = 2 u - (1-c) u_prev + dt^2 (Lu + S),
    c = mu dt / (2 (1+t)); the damping average keeps the update explicit
    at second order.
    """
    if state.dt > CFL_LIMIT * state.grid.dr:
        raise DomainError(f"time step {state.dt} violates the CFL bound {CFL_LIMIT * state.grid.dr}")
    mu, p = config.model.mu, config.model.p
    source = memory_source(state, kernel) if config.memory_enabled else 0.0
    c = mu * state.dt / (2.0 * (1.0 + state.t))
    rhs = 2.0 * state.u_curr - (1.0 - c) * state.u_prev
    rhs += state.dt**2 * (_laplacian(state.u_curr, state.grid) + source)
    u_next = rhs / (1.0 + c)
    u_next[-1] = 0.0
    state.u_prev = state.u_curr
    state.u_curr = u_next
    state.m += 1
    state.t += state.dt
    if state.m < state.history.shape[0]:
        state.history[state.m] = np.abs(u_next) ** p
    _check_support(state, config.r_support)
    return state


def _radial_weights(grid: SpaceGrid) -> np.ndarray:
    """Trapezoid quadrature against the volume measure |S^(n-1)| r^(n-1) dr."""
    w = grid.nodes ** (grid.n - 1) * grid.dr
    w[0] *= 0.5
    w[-1] *= 0.5
    return surface_area(grid.n) * w


def _initial_state(config: SolverConfig, kernel_steps: int) -> tuple[SimulationState, np.ndarray]:
    grid = config.space_grid()
    dt = config.dt_factor * grid.dr
    r = grid.nodes
    p = config.model.p
    bump = bump_profile(r, config.r_support)
    u0 = config.u0_scale * bump
    u1 = config.u1_scale * bump
    history = np.zeros((kernel_steps + 1, grid.points))
    history[0] = np.abs(u0) ** p
    # Taylor start: u_tt(0) = Lu_0 + S(0) - mu u_t(0), S(0) = 0
    mu = config.model.mu
    u_first = u0 + dt * u1 + 0.5 * dt**2 * (_laplacian(u0, grid) - mu * u1)
    u_first[-1] = 0.0
    history[1] = np.abs(u_first) ** p
    state = SimulationState(m=1, t=dt, dt=dt, u_prev=u0, u_curr=u_first, history=history, grid=grid)
    return state, u0


def _run_loop(config: SolverConfig) -> RunRecord:
    grid = config.space_grid()
    dt = config.dt_factor * grid.dr
    steps = int(math.ceil(config.t_end / dt))
    kernel = MemoryKernel.build(config.model.gamma, dt, steps, config.memory_interpolation)
    state, u0 = _initial_state(config, steps)
    weights = _radial_weights(grid)
    mu, p = config.model.mu, config.model.p

    times = [0.0, state.t]
    functional = [float(weights @ u0), float(weights @ state.u_curr)]
    sup_abs = [float(np.max(np.abs(u0))), float(np.max(np.abs(state.u_curr)))]
    support = [_support_radius(u0, grid), _support_radius(state.u_curr, grid)]
    lp_mass = [float(weights @ state.history[0]), float(weights @ state.history[1])]
    energy = [_energy(u0, config.u1_scale * bump_profile(grid.nodes, config.r_support), grid, weights)]
    energy.append(_energy(state.u_curr, (state.u_curr - state.u_prev) / dt, grid, weights))
    profiles = [u0.copy(), state.u_curr.copy()] if config.store_profiles else None

    outcome = "completed"
    blowup_time = None
    while state.m < steps:
        state = step(state, kernel, config)
        times.append(state.t)
        functional.append(float(weights @ state.u_curr))
        sup_abs.append(float(np.max(np.abs(state.u_curr))))
        support.append(_support_radius(state.u_curr, grid))
        lp_mass.append(float(weights @ state.history[state.m]))
        energy.append(_energy(state.u_curr, (state.u_curr - state.u_prev) / dt, grid, weights))
        if profiles is not None:
            profiles.append(state.u_curr.copy())
        if not np.isfinite(sup_abs[-1]) or sup_abs[-1] > config.blowup_threshold:
            outcome = "blowup_detected"
            blowup_time = state.t
            break

    times_arr = np.asarray(times)
    f_arr = np.asarray(functional)
    half = 1.0 + 0.5 * (times_arr[1:] + times_arr[:-1])
    weighted = half**mu * np.diff(f_arr) / dt
    return RunRecord(
        config=config,
        times=times_arr,
        functional=f_arr,
        sup_abs=np.asarray(sup_abs),
        energy=np.asarray(energy),
        support_radius=np.asarray(support),
        lp_mass=np.asarray(lp_mass),
        weighted_derivative=weighted,
        outcome=outcome,
        blowup_time_estimate=blowup_time,
        profiles=None if profiles is None else np.asarray(profiles),
    )


def _energy(u: np.ndarray, ut: np.ndarray, grid: SpaceGrid, weights: np.ndarray) -> float:
    grad = np.gradient(u, grid.dr)
    return float(weights @ (0.5 * (ut**2 + grad**2)))


def simulate(config: SolverConfig) -> RunRecord:
    """Run to t_end or first threshold crossing; deterministic per config.

    A detected crossing is refined by one Richardson pass: the run is
    repeated on a grid coarsened by a factor two and the two first
    crossings are extrapolated linearly in the spacing.
    """
    grid = config.space_grid()
    if config.dt_factor > CFL_LIMIT:
        empty = np.zeros(1)
        r = grid.nodes
        u0 = config.u0_scale * bump_profile(r, config.r_support)
        w = _radial_weights(grid)
        return RunRecord(
            config=config,
            times=np.zeros(1),
            functional=np.asarray([float(w @ u0)]),
            sup_abs=np.asarray([float(np.max(np.abs(u0)))]),
            energy=empty,
            support_radius=np.asarray([_support_radius(u0, grid)]),
            lp_mass=np.asarray([float(w @ np.abs(u0) ** config.model.p)]),
            weighted_derivative=np.zeros(0),
            outcome="cfl_violation",
            blowup_time_estimate=None,
        )
    record = _run_loop(config)
    if (
        record.outcome == "blowup_detected"
        and config.richardson_refine
        and config.points >= 32
    ):
        coarse_cfg = replace(
            config, points=config.points // 2 + 1, richardson_refine=False, store_profiles=False
        )
        coarse = _run_loop(coarse_cfg)
        if coarse.outcome == "blowup_detected":
            refined = 2.0 * record.blowup_time_estimate - coarse.blowup_time_estimate
            if refined > 0.0:
                record = replace(record, blowup_time_estimate=refined)
    return record


def liouville_mode(config: SolverConfig) -> RunRecord:
    """Undamped evolution of v = (1+t)u, valid exactly at mu = 2.

    v solves v_tt - Lv = c_gamma (1+t) int (t-tau)^(-gamma) (1+tau)^(-p) |v|^p,
    and the reported traces are for u = v/(1+t), so they are directly
    comparable with simulate() at the same config.
    """
    if config.model.mu != 2.0:
        raise DomainError(f"the transform removes the damping only at mu = 2, got {config.model.mu}")
    grid = config.space_grid()
    if config.dt_factor > CFL_LIMIT:
        return simulate(config)  # same early cfl_violation record
    dt = config.dt_factor * grid.dr
    steps = int(math.ceil(config.t_end / dt))
    kernel = MemoryKernel.build(config.model.gamma, dt, steps, config.memory_interpolation)
    weights = _radial_weights(grid)
    r = grid.nodes
    p = config.model.p
    bump = bump_profile(r, config.r_support)
    v0 = config.u0_scale * bump
    # v_t(0) = u(0) + u_t(0)
    vt0 = config.u0_scale * bump + config.u1_scale * bump
    history = np.zeros((steps + 1, grid.points))
    history[0] = np.abs(v0) ** p  # (1+0)^(-p) = 1
    v1 = v0 + dt * vt0 + 0.5 * dt**2 * _laplacian(v0, grid)
    v1[-1] = 0.0
    history[1] = (1.0 + dt) ** -p * np.abs(v1) ** p

    times = [0.0, dt]
    u_of = lambda v, t: v / (1.0 + t)
    u_first = u_of(v1, dt)
    functional = [float(weights @ v0), float(weights @ u_first)]
    sup_abs = [float(np.max(np.abs(v0))), float(np.max(np.abs(u_first)))]
    support = [_support_radius(v0, grid), _support_radius(v1, grid)]
    lp_mass = [float(weights @ np.abs(v0) ** p), float(weights @ np.abs(u_first) ** p)]
    energy = [
        _energy(v0, config.u1_scale * bump, grid, weights),
        _energy(u_first, (u_first - v0) / dt, grid, weights),
    ]

    v_prev, v_curr = v0, v1
    t = dt
    m = 1
    outcome = "completed"
    blowup_time = None
    while m < steps:
        source = (1.0 + t) * kernel.convolve(history, m) if config.memory_enabled else 0.0
        v_next = 2.0 * v_curr - v_prev + dt**2 * (_laplacian(v_curr, grid) + source)
        v_next[-1] = 0.0
        v_prev, v_curr = v_curr, v_next
        m += 1
        t += dt
        history[m] = (1.0 + t) ** -p * np.abs(v_curr) ** p
        _assert_cone(v_curr, grid, config.r_support, m)
        u_now = u_of(v_curr, t)
        times.append(t)
        functional.append(float(weights @ u_now))
        sup_abs.append(float(np.max(np.abs(u_now))))
        support.append(_support_radius(v_curr, grid))
        lp_mass.append(float(weights @ np.abs(u_now) ** p))
        energy.append(_energy(u_now, (u_of(v_curr, t) - u_of(v_prev, t - dt)) / dt, grid, weights))
        if not np.isfinite(sup_abs[-1]) or sup_abs[-1] > config.blowup_threshold:
            outcome = "blowup_detected"
            blowup_time = t
            break

    times_arr = np.asarray(times)
    f_arr = np.asarray(functional)
    half = 1.0 + 0.5 * (times_arr[1:] + times_arr[:-1])
    weighted = half**2.0 * np.diff(f_arr) / dt
    return RunRecord(
        config=config,
        times=times_arr,
        functional=f_arr,
        sup_abs=np.asarray(sup_abs),
        energy=np.asarray(energy),
        support_radius=np.asarray(support),
        lp_mass=np.asarray(lp_mass),
        weighted_derivative=weighted,
        outcome=outcome,
        blowup_time_estimate=blowup_time,
    )


def ode_model(
    n: int,
    mu: float,
    gamma: float,
    p: float,
    F0: float,
    F1: float,
    t_end: float,
    steps: int,
    R: float = 1.0,
    threshold: float = 1e8,
) -> OdeTrace:
    """Volterra reduction: F'' + mu/(1+t) F' = kernel sum of C0 (1+t)^(-n(p-1)) F^p.

    C0 = (v_n R^n)^(1-p) is the Holder floor relating the p-th power
    mass on the support cone to F itself; blow-up of this scalar model
    is exactly what the iteration engine certifies.
    """
    if F0 < 0.0 or F1 < 0.0:
        raise DomainError(f"data must be nonnegative, got F0={F0}, F1={F1}")
    if steps < 2 or not t_end > 0.0:
        raise DomainError("need steps >= 2 and t_end > 0")
    dt = t_end / steps
    kernel = MemoryKernel.build(gamma, dt, steps, "linear")
    vol = math.pi ** (n / 2.0) / math.gamma(n / 2.0 + 1.0) * R**n
    C0 = vol ** (1.0 - p)
    F = np.empty(steps + 1)
    q = np.zeros((steps + 1, 1))
    F[0] = F0
    q[0, 0] = C0 * max(F0, 0.0) ** p
    # Taylor start; the memory source vanishes at t = 0
    F[1] = F0 + dt * F1 + 0.5 * dt**2 * (-mu * F1)
    q[1, 0] = C0 * (1.0 + dt) ** (-n * (p - 1.0)) * max(F[1], 0.0) ** p
    t = dt
    last = steps
    crossing = None
    for m in range(1, steps):
        source = float(kernel.convolve(q, m)[0])
        c = mu * dt / (2.0 * (1.0 + t))
        F[m + 1] = (2.0 * F[m] - (1.0 - c) * F[m - 1] + dt**2 * source) / (1.0 + c)
        t += dt
        q[m + 1, 0] = C0 * (1.0 + t) ** (-n * (p - 1.0)) * max(F[m + 1], 0.0) ** p
        if not np.isfinite(F[m + 1]) or F[m + 1] > threshold:
            crossing = t
            last = m + 1
            break
    times = dt * np.arange(last + 1)
    values = F[: last + 1]
    half = 1.0 + 0.5 * (times[1:] + times[:-1])
    weighted = half**mu * np.diff(values) / dt
    return OdeTrace(times=times, values=values, weighted_derivative=weighted, crossing_time=crossing)
