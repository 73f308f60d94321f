"""Iteration engine for blow-up of functionals satisfying a nested integral frame.

The engine works with lower bounds of the form

    F(t) >= K_j (1+t)^(-alpha_j) (t - T0)^(beta_j),

closed under the frame

    F(t) >= Ktilde0 (1+t)^(-a0)
            int_T0^t (1+r)^a1 int_T0^r (1+s)^a2 int_T0^s (1+tau)^a3 |F(tau)|^p dtau ds dr,

which drives the recursions alpha_(j+1) = a0 + p alpha_j,
beta_(j+1) = a1+a2+a3+3 + p beta_j and
K_(j+1) = Ktilde0 K_j^p / beta_(j+1)^3.  When the margin

    (beta0 - alpha0)(p - 1) + a1 + a2 + a3 + 3 - a0

is positive, the iterated bounds diverge beyond an explicit time and the
functional cannot stay finite.  All K_j arithmetic lives in log space:
the constants are doubly exponential in j and overflow any linear
representation near j = 20.

build_kato_instance wires the abstract frame to concrete model
parameters (damping mu, kernel order gamma, power p in dimension n),
with the spatial constant taken from Holder's inequality on balls of
radius R + t and the initial constant C1 calibrated from a solver run.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import CertificateError, DataError, DomainError
from .exponents import ModelParams
from .fractional import TimeGrid

__all__ = [
    "KatoParams",
    "KatoTrace",
    "normalize_negative_exponents",
    "check_blowup_condition",
    "iterate_sequences",
    "summation_identity_check",
    "lower_envelope",
    "blowup_time_bound",
    "build_kato_instance",
    "nested_integral_oracle",
    "calibrate_initial_constant",
]

MAX_ITERATIONS = 200


@dataclass(frozen=True)
class KatoParams:
    """Exponents and constants of the nested integral frame."""

    alpha0: float
    beta0: float
    K0: float
    Ktilde0: float
    a0: float
    a1: float
    a2: float
    a3: float
    p: float
    T0: float = 0.0

    def __post_init__(self) -> None:
        if not (self.alpha0 >= 0.0 and self.beta0 >= 0.0):
            raise DomainError(f"initial exponents must be >= 0, got {self.alpha0}, {self.beta0}")
        if not (self.K0 > 0.0 and self.Ktilde0 > 0.0):
            raise DomainError(f"constants must be > 0, got K0={self.K0}, Ktilde0={self.Ktilde0}")
        if not self.p > 1.0:
            raise DomainError(f"power must be > 1, got {self.p}")
        if not self.T0 >= 0.0:
            raise DomainError(f"onset time must be >= 0, got {self.T0}")
        for name in ("a0", "a1", "a2", "a3"):
            if not math.isfinite(getattr(self, name)):
                raise DomainError(f"frame exponent {name} must be finite")

    @property
    def weight_sum(self) -> float:
        """a1 + a2 + a3 + 3: growth of beta_j per iteration."""
        return self.a1 + self.a2 + self.a3 + 3.0


@dataclass(frozen=True)
class KatoTrace:
    """Iterated exponent sequences with constants kept as logarithms."""

    alpha_j: np.ndarray
    beta_j: np.ndarray
    K_j_log: np.ndarray
    D: float
    j0: int
    E0_log: float


def normalize_negative_exponents(params: KatoParams, t_ref: float = 0.0) -> KatoParams:
    """Absorb negative inner weights into the front exponent.

    For a_k < 0 the weight (1+tau)^a_k only decreases along the nested
    integration, so it may be bounded below by (1+t)^a_k and moved in
    front, raising a0 by |a_k| and zeroing a_k.  The blow-up margin is
    unchanged.  t_ref is accepted for signature stability; the absorption
    is valid uniformly in time and does not consult it.
    """
    updates: dict[str, float] = {}
    a0 = params.a0
    for name in ("a1", "a2", "a3"):
        val = getattr(params, name)
        if val < 0.0:
            a0 -= val
            updates[name] = 0.0
    if not updates:
        return params
    updates["a0"] = a0
    return replace(params, **updates)


def check_blowup_condition(params: KatoParams) -> tuple[bool, float]:
    """Margin (beta0-alpha0)(p-1) + a1+a2+a3+3 - a0; positive means blow-up."""
    margin = (params.beta0 - params.alpha0) * (params.p - 1.0) + params.weight_sum - params.a0
    return margin > 0.0, margin


def iterate_sequences(params: KatoParams, J: int) -> KatoTrace:
    """Run the exponent/constant recursions for j = 0..J.

    Also computes the frame constant D = Ktilde0 (beta0 + S/(p-1))^-3,
    the onset index j0 (smallest positive integer at least
    log D/(3 log p) - p/(p-1)), and log E0, the per-iteration floor with
    log K_j >= p^j log E0 for j >= j0.
    """
    if not 1 <= J <= MAX_ITERATIONS:
        raise DomainError(f"iteration count must lie in [1, {MAX_ITERATIONS}], got {J}")
    p, S = params.p, params.weight_sum
    alpha = np.empty(J + 1)
    beta = np.empty(J + 1)
    klog = np.empty(J + 1)
    alpha[0], beta[0], klog[0] = params.alpha0, params.beta0, math.log(params.K0)
    lk = math.log(params.Ktilde0)
    for j in range(J):
        alpha[j + 1] = params.a0 + p * alpha[j]
        beta[j + 1] = S + p * beta[j]
        klog[j + 1] = p * klog[j] + lk - 3.0 * math.log(beta[j + 1])
    D = params.Ktilde0 * (params.beta0 + S / (p - 1.0)) ** -3.0
    j0 = max(1, math.ceil(math.log(D) / (3.0 * math.log(p)) - p / (p - 1.0)))
    E0_log = klog[0] - 3.0 * p * math.log(p) / (p - 1.0) ** 2 + math.log(D) / (p - 1.0)
    return KatoTrace(alpha_j=alpha, beta_j=beta, K_j_log=klog, D=D, j0=j0, E0_log=E0_log)


def summation_identity_check(p: float, j: int) -> float:
    """|sum_(k<j) (j-k) p^k - ((p^(j+1)-p)/(p-1) - j)/(p-1)|, zero analytically."""
    if not p > 1.0:
        raise DomainError(f"power must be > 1, got {p}")
    if j < 1:
        raise DomainError(f"index must be >= 1, got {j}")
    direct = sum((j - k) * p**k for k in range(j))
    formula = ((p ** (j + 1) - p) / (p - 1.0) - j) / (p - 1.0)
    return abs(direct - formula)


def _inner_log_at(params: KatoParams, trace: KatoTrace, log_t: float) -> float:
    """log of the quantity raised to p^j in the final lower bound."""
    p, S = params.p, params.weight_sum
    shift = -params.alpha0 - params.beta0 - (params.a0 + S) / (p - 1.0)
    grow = params.beta0 - params.alpha0 + (S - params.a0) / (p - 1.0)
    return trace.E0_log + shift * math.log(2.0) + grow * log_t


def lower_envelope(params: KatoParams, trace: KatoTrace, t: float, j: int) -> float:
    """log of the iterated lower bound for F(t) at iteration j.

    Divergence as j grows certifies blow-up at t; the sign of the inner
    logarithm decides between +inf and -inf.
    """
    threshold = max(1.0, 2.0 * params.T0)
    if not t >= threshold:
        raise DomainError(f"envelope needs t >= {threshold}, got {t}")
    if j < trace.j0:
        raise DomainError(f"envelope needs j >= j0 = {trace.j0}, got {j}")
    p, S = params.p, params.weight_sum
    return (
        p**j * _inner_log_at(params, trace, math.log(t))
        + params.a0 / (p - 1.0) * math.log(1.0 + t)
        - S / (p - 1.0) * math.log(t - params.T0)
    )


def blowup_time_bound(params: KatoParams, trace: KatoTrace) -> float:
    """Smallest admissible t where the inner logarithm turns positive.

    Beyond the returned time the envelope diverges with j.  Bisection on
    log t to 1e-10 relative, clamped below by max(1, 2 T0).
    """
    holds, margin = check_blowup_condition(params)
    if not holds:
        raise CertificateError(f"blow-up condition fails (margin {margin}); no certified time")
    onset = max(1.0, 2.0 * params.T0)
    lo = math.log(onset)
    if _inner_log_at(params, trace, lo) >= 0.0:
        return onset
    hi = lo + 1.0
    while _inner_log_at(params, trace, hi) < 0.0:
        hi = lo + 2.0 * (hi - lo)
        if hi > 700.0:  # exp would overflow the float range
            raise CertificateError("certified time exceeds the floating-point range")
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if _inner_log_at(params, trace, mid) < 0.0:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-12:
            break
    return math.exp(hi)


def unit_ball_volume(n: int) -> float:
    return math.pi ** (n / 2.0) / math.gamma(n / 2.0 + 1.0)


def build_kato_instance(model: ModelParams, R: float, T0: float, C1: float) -> KatoParams:
    """Concrete frame for the damped wave model with memory nonlinearity.

    The front weight collects the damping and the kernel constant; the
    spatial constant comes from Holder's inequality on the light cone
    B_(R+t), where |B_(R+t)| <= v_n R^n (1+t)^n for R >= 1 feeds the
    (1+t)^(n(p-1)) part of a0.  C1 scales the calibrated initial bound.
    """
    if not R >= 1.0:
        raise DomainError(f"support radius must be >= 1, got {R}")
    if not C1 > 0.0:
        raise DomainError(f"initial constant must be > 0, got {C1}")
    n, mu, gamma, p = model.n, model.mu, model.gamma, model.p
    c_gamma = 1.0 / math.gamma(1.0 - gamma)
    return KatoParams(
        alpha0=mu + (n + mu - 1.0) * p / 2.0,
        beta0=n + mu + 2.0 - gamma,
        K0=C1 * c_gamma / (n * (n + mu + 1.0) * (n + mu + 2.0)),
        Ktilde0=(unit_ball_volume(n) * R**n) ** (1.0 - p) * c_gamma,
        a0=mu + gamma + n * (p - 1.0),
        a1=0.0,
        a2=mu,
        a3=0.0,
        p=p,
        T0=T0,
    )


def _cumulative_trapezoid(values: np.ndarray, h: float) -> np.ndarray:
    out = np.zeros_like(values)
    np.cumsum(0.5 * h * (values[1:] + values[:-1]), out=out[1:])
    return out


def nested_integral_oracle(params: KatoParams, F_initial, grid: TimeGrid) -> np.ndarray:
    """One application of the frame map to a lower-bound candidate.

    The triple cumulative integral is evaluated by the trapezoid rule.
    The analytic next-step bound discards the denominators' slack
    (beta_(j+1)^3 against (p beta_j + 1)(p beta_j + 2)(p beta_j + 3)),
    so the quadrature output stays above it at every node; a one-sided
    rule would instead produce exact zeros on the first cells and break
    that ordering.
    """
    if grid.t_start != params.T0:
        raise DomainError(f"grid must start at T0 = {params.T0}, got {grid.t_start}")
    t = grid.nodes
    F = np.asarray(F_initial(t) if callable(F_initial) else F_initial, dtype=float)
    if F.shape != t.shape:
        raise DataError(f"expected {t.shape[0]} samples, got shape {F.shape}")
    if np.any(F < 0.0) or not np.all(np.isfinite(F)):
        raise DataError("lower-bound candidate must be nonnegative and finite")
    inner = _cumulative_trapezoid((1.0 + t) ** params.a3 * np.abs(F) ** params.p, grid.h)
    middle = _cumulative_trapezoid((1.0 + t) ** params.a2 * inner, grid.h)
    outer = _cumulative_trapezoid((1.0 + t) ** params.a1 * middle, grid.h)
    return params.Ktilde0 * (1.0 + t) ** -params.a0 * outer


def calibrate_initial_constant(
    model: ModelParams,
    R: float = 1.0,
    T0: float | None = None,
    safety: float = 1.0,
) -> tuple[float, float]:
    """Fit C1 from a solver run: the minimum over [T0, 2 T0] of the
    ratio of the p-th power mass to its predicted growth
    (1+t)^(n-1-(n+mu-1)p/2).  Returns (C1, T0); T0 defaults to 10 R.
    """
    from .solver import SolverConfig, simulate

    if T0 is None:
        T0 = 10.0 * R
    if not T0 > 0.0:
        raise DomainError(f"calibration needs T0 > 0, got {T0}")
    config = SolverConfig(model=model, r_support=R, t_end=2.0 * T0)
    record = simulate(config)
    t = record.times
    window = (t >= T0) & (t <= 2.0 * T0)
    if not np.any(window):
        raise DomainError("solver run too short to cover the calibration window")
    n, mu, p = model.n, model.mu, model.p
    predicted = (1.0 + t[window]) ** (n - 1.0 - (n + mu - 1.0) * p / 2.0)
    ratio = record.lp_mass[window] / predicted
    c1 = float(np.min(ratio)) * safety
    if not c1 > 0.0:
        raise CertificateError("calibration window produced a vanishing lower constant")
    return c1, T0
