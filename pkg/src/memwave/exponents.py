"""Critical exponents and blow-up classification for the damped memory wave model.

The model under study is

    u_tt - Delta u + mu/(1+t) u_t = c_gamma * int_0^t (t-s)^(-gamma) |u(s)|^p ds

on R^n, with damping strength mu > 0 and kernel order gamma in (0,1).
Two sufficient blow-up conditions are implemented:

* the test-function criterion, a case table over mu built from the
  exponent families p1..p4 below (effective, parabolic-like range), and
* the iteration criterion, a strict bound by the memory Strauss
  exponent at the shifted dimension n + mu (noneffective,
  hyperbolic-like range).

Exponent families (all reported by :func:`shifted_exponents`):

    p1 = 1 + (3-gamma)/(n-1+gamma)
    p2 = 1 + (2-gamma)/(n*d0 - 2 + gamma)_+      d0 = 1/4 + sqrt(1/16 + (2-gamma)/n)
    p3 = 1 + (3-gamma)/(n+mu+gamma-2)_+
    p4 = 1 + (2-gamma)/(n*d1 - 2 + gamma)_+      d1 = 1/4 + sqrt(1/16 + (mu+1)(2-gamma)/(2n))

Degenerate positive-part denominators produce IEEE infinity, which
orders correctly against every finite p, so downstream comparisons need
no sentinel handling.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import DomainError

__all__ = [
    "ModelParams",
    "ExponentReport",
    "Regime",
    "Verdict",
    "BlowupVerdict",
    "RegionCell",
    "fujita_exponent",
    "strauss_exponent",
    "memory_strauss_exponent",
    "memory_fujita_exponent",
    "sobolev_cap",
    "shifted_exponents",
    "testfn_bound",
    "iteration_bound",
    "classify",
    "region_grid",
]


@dataclass(frozen=True)
class ModelParams:
    """Parameter point (n, mu, gamma, p) of the damped memory wave model."""

    n: int
    mu: float
    gamma: float
    p: float

    def __post_init__(self) -> None:
        if not (isinstance(self.n, int) and self.n >= 1):
            raise DomainError(f"spatial dimension must be an integer >= 1, got {self.n!r}")
        if not (self.mu > 0 and math.isfinite(self.mu)):
            raise DomainError(f"damping strength must be finite and > 0, got {self.mu!r}")
        if not (0.0 < self.gamma < 1.0):
            raise DomainError(f"kernel order must lie in (0, 1), got {self.gamma!r}")
        if not (self.p > 1 and math.isfinite(self.p)):
            raise DomainError(f"power must be finite and > 1, got {self.p!r}")


@dataclass(frozen=True)
class ExponentReport:
    """All exponent families evaluated at one (n, mu, gamma) point."""

    fujita: float
    strauss: float
    p0: float
    p1: float
    p2: float
    p3: float
    p4: float
    d0: float
    d1: float
    sobolev_cap: float


class Regime(Enum):
    MU_LE_1 = "mu_le_1"
    MU_GT_1_NE_2 = "mu_gt_1_ne_2"
    MU_EQ_2 = "mu_eq_2"


class Verdict(Enum):
    BLOWUP_TESTFN = "blowup_testfn"
    BLOWUP_ITERATION = "blowup_iteration"
    BLOWUP_BOTH = "blowup_both"
    OUTSIDE_KNOWN_RANGE = "outside_known_range"


@dataclass(frozen=True)
class BlowupVerdict:
    """Outcome of both sufficient blow-up conditions at one parameter point.

    The test-function bound is non-strict (p <= bound certifies), the
    iteration bound strict and additionally capped by n/(n-2)_+.  The
    data_note records the sign condition on the initial data that the
    certifying criterion assumes; this module sees no data and cannot
    check it.
    """

    regime: Regime
    testfn_bound: float
    iteration_bound: float
    testfn_applies: bool
    iteration_applies: bool
    verdict: Verdict
    data_note: str


@dataclass(frozen=True)
class RegionCell:
    """One cell of a region sweep: coordinates plus the verdict there."""

    mu: float
    gamma: float
    p: float
    verdict: BlowupVerdict


def _positive_root(a: float, b: float, c: float) -> float:
    """Positive root of a*p^2 - b*p - c = 0 with a >= 0, b, c > 0.

    Both numerator addends are positive, so there is no cancellation,
    but near-degenerate a (root ~ b/a large) still loses a few digits
    through the division.  Extended precision keeps the returned double
    correctly rounded, which the residual tolerance needs at the
    degenerate end of the domain.
    """
    if a == 0.0:
        return math.inf
    al, bl, cl = np.longdouble(a), np.longdouble(b), np.longdouble(c)
    return float((bl + np.sqrt(bl * bl + 4.0 * al * cl)) / (2.0 * al))


def _over_positive_part(num: float, den: float) -> float:
    """1 + num/(den)_+ with the convention x/0_+ = infinity."""
    if den <= 0.0:
        return math.inf
    return 1.0 + num / den


def fujita_exponent(n: float) -> float:
    """Fujita exponent 1 + 2/n; accepts real n > 0 for shifted dimensions."""
    if not n > 0:
        raise DomainError(f"dimension must be > 0, got {n!r}")
    return 1.0 + 2.0 / n


def strauss_exponent(n_eff: float) -> float:
    """Strauss exponent: positive root of (n-1)p^2 - (n+1)p - 2 at n = n_eff.

    Real arguments are accepted because the model shifts the dimension
    by mu.  At n_eff = 1 the quadratic degenerates and the exponent is
    infinite by convention.
    """
    if not n_eff >= 1:
        raise DomainError(f"effective dimension must be >= 1, got {n_eff!r}")
    return _positive_root(n_eff - 1.0, n_eff + 1.0, 2.0)


def memory_strauss_exponent(n_eff: float, gamma: float) -> float:
    """Memory analogue of the Strauss exponent.

    Positive root of (n-1)p^2 - (n+3-2*gamma)p - 2 = 0 at n = n_eff,
    infinite at n_eff = 1.  Recovers :func:`strauss_exponent` as
    gamma -> 1.
    """
    if not n_eff >= 1:
        raise DomainError(f"effective dimension must be >= 1, got {n_eff!r}")
    if not (0.0 < gamma < 1.0):
        raise DomainError(f"kernel order must lie in (0, 1), got {gamma!r}")
    return _positive_root(n_eff - 1.0, n_eff + 3.0 - 2.0 * gamma, 2.0)


def memory_fujita_exponent(n: int, gamma: float) -> float:
    """Fujita-type exponent 1 + 2(2-gamma)/(n - 2(1-gamma))_+ of the memory model."""
    if not (isinstance(n, int) and n >= 1):
        raise DomainError(f"spatial dimension must be an integer >= 1, got {n!r}")
    if not (0.0 < gamma < 1.0):
        raise DomainError(f"kernel order must lie in (0, 1), got {gamma!r}")
    return _over_positive_part(2.0 * (2.0 - gamma), n - 2.0 * (1.0 - gamma))


def sobolev_cap(n: int) -> float:
    """Energy-space admissibility cap n/(n-2)_+ (infinite for n <= 2)."""
    if n <= 2:
        return math.inf
    return n / (n - 2.0)


def shifted_exponents(params: ModelParams) -> ExponentReport:
    """Evaluate every exponent family at the model's (n, mu, gamma).

    The p field of ``params`` is ignored.  The reported p0 is taken at
    the shifted dimension n + mu, matching the iteration criterion.
    """
    n, mu, gamma = params.n, params.mu, params.gamma
    d0 = 0.25 + math.sqrt(1.0 / 16.0 + (2.0 - gamma) / n)
    d1 = 0.25 + math.sqrt(1.0 / 16.0 + (mu + 1.0) * (2.0 - gamma) / (2.0 * n))
    return ExponentReport(
        fujita=fujita_exponent(n),
        strauss=strauss_exponent(n),
        p0=memory_strauss_exponent(n + mu, gamma),
        p1=1.0 + (3.0 - gamma) / (n - 1.0 + gamma),
        p2=_over_positive_part(2.0 - gamma, n * d0 - 2.0 + gamma),
        p3=_over_positive_part(3.0 - gamma, n + mu + gamma - 2.0),
        p4=_over_positive_part(2.0 - gamma, n * d1 - 2.0 + gamma),
        d0=d0,
        d1=d1,
        sobolev_cap=sobolev_cap(n),
    )


def testfn_bound(params: ModelParams) -> float:
    """Largest p certified to blow up by the test-function criterion.

    Case table over the damping strength; the bound is understood as
    non-strict (p equal to the bound still blows up).
    """
    n = params.n
    report = shifted_exponents(params)
    cap = report.sobolev_cap
    if params.mu > 1.0 and params.mu != 2.0:
        if n <= 2:
            return report.p1
        if n == 3:
            return min(report.p1, report.p2)
        return min(report.p2, cap)
    if params.mu == 2.0:
        return min(report.p1, cap)
    # mu in (0, 1]
    if n == 1:
        return report.p3
    if n == 2:
        return min(report.p3, report.p4)
    if n == 3:
        return min(report.p3, report.p4, 3.0)
    return min(report.p4, cap)


def iteration_bound(params: ModelParams) -> float:
    """Strict upper bound of the iteration criterion: p0 at dimension n + mu.

    Callers must treat the bound as strict and additionally require
    p <= n/(n-2)_+ for the solution class it applies to.
    """
    return memory_strauss_exponent(params.n + params.mu, params.gamma)


_NOTE_TF_MU_GT_1 = "test-function certificate assumes integral of u1-(mu-1)*u0 positive"
_NOTE_TF_MU_LE_1 = "test-function certificate assumes integral of u1 positive"
_NOTE_ITERATION = (
    "iteration certificate assumes nonnegative, nontrivial data supported in a ball of radius >= 1"
)


def classify(params: ModelParams) -> BlowupVerdict:
    """Report which sufficient blow-up condition certifies the point, if any."""
    if params.mu <= 1.0:
        regime = Regime.MU_LE_1
        tf_note = _NOTE_TF_MU_LE_1
    elif params.mu == 2.0:
        regime = Regime.MU_EQ_2
        tf_note = _NOTE_TF_MU_GT_1
    else:
        regime = Regime.MU_GT_1_NE_2
        tf_note = _NOTE_TF_MU_GT_1

    tf_bound = testfn_bound(params)
    it_bound = iteration_bound(params)
    cap = sobolev_cap(params.n)

    tf_applies = params.p <= tf_bound
    it_applies = params.p < it_bound and params.p <= cap

    if tf_applies and it_applies:
        verdict = Verdict.BLOWUP_BOTH
        note = tf_note + "; " + _NOTE_ITERATION
    elif tf_applies:
        verdict = Verdict.BLOWUP_TESTFN
        note = tf_note
    elif it_applies:
        verdict = Verdict.BLOWUP_ITERATION
        note = _NOTE_ITERATION
    else:
        verdict = Verdict.OUTSIDE_KNOWN_RANGE
        note = ""

    return BlowupVerdict(
        regime=regime,
        testfn_bound=tf_bound,
        iteration_bound=it_bound,
        testfn_applies=tf_applies,
        iteration_applies=it_applies,
        verdict=verdict,
        data_note=note,
    )


def _axis(name: str, lo: float, hi: float, count: int) -> list[float]:
    if count < 1:
        raise DomainError(f"{name} axis needs at least one sample, got {count}")
    if lo > hi:
        raise DomainError(f"{name} axis is empty: [{lo}, {hi}]")
    if count == 1:
        if lo != hi:
            raise DomainError(f"{name} axis with one sample needs lo == hi, got [{lo}, {hi}]")
        return [lo]
    step = (hi - lo) / (count - 1)
    return [lo + i * step for i in range(count)]


def region_grid(
    n: int,
    mu_range: tuple[float, float],
    gamma_range: tuple[float, float],
    p_range: tuple[float, float],
    resolutions: tuple[int, int, int],
) -> list[RegionCell]:
    """Classify every cell of a (mu, gamma, p) grid at fixed dimension n.

    Rows are emitted in row-major order, mu slowest and p fastest, so
    repeated sweeps serialize identically.  An axis may be collapsed to
    a single value by giving it resolution 1 with lo == hi.
    """
    mus = _axis("mu", *mu_range, resolutions[0])
    gammas = _axis("gamma", *gamma_range, resolutions[1])
    ps = _axis("p", *p_range, resolutions[2])
    cells = []
    for mu in mus:
        for gamma in gammas:
            for p in ps:
                verdict = classify(ModelParams(n=n, mu=mu, gamma=gamma, p=p))
                cells.append(RegionCell(mu=mu, gamma=gamma, p=p, verdict=verdict))
    return cells
