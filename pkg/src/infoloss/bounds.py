"""Closed-form information-loss bounds and the empirical k(m') model.

Convention: the product-form bound, its H(X) corollary, and the legacy
exponential bound are in bits; the tail bounds use natural logs throughout
(large-deviation convention). Tail expressions are evaluated in log space so
the 2^(m'|Y|) prefactor never overflows.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, InsufficientData
from .info import binary_entropy

LN2 = math.log(2.0)


# Derived inputs (TVs, mutual informations) carry rounding; boundary
# violations inside this slack are clamped, anything larger is a real error.
_EDGE_TOL = 1e-10


def _clamp_unit(x: float, name: str) -> float:
    if not -_EDGE_TOL <= x <= 1.0 + _EDGE_TOL:
        raise DomainError(f"{name} must lie in [0,1], got {x!r}")
    return min(max(x, 0.0), 1.0)


def _clamp_nonneg(x: float, name: str) -> float:
    if x < -_EDGE_TOL:
        raise DomainError(f"{name} must be nonnegative, got {x!r}")
    return max(x, 0.0)


def thm1_bound(delta_bar: float, i_xz: float) -> float:
    """Product-form loss bound: delta_bar * I(X;Z) + h2(delta_bar), bits."""
    delta_bar = _clamp_unit(delta_bar, "delta_bar")
    i_xz = _clamp_nonneg(i_xz, "i_xz")
    return delta_bar * i_xz + binary_entropy(delta_bar)


def cor1_bound(delta_bar: float, h_x: float) -> float:
    """Discrete-X special case: delta_bar * H(X) + h2(delta_bar), bits."""
    return thm1_bound(delta_bar, h_x)


def type2_bound(k_value: float, eps: float) -> float:
    """Relevance-gap bound 2 K + eps from any type-1 bound K."""
    if k_value < 0.0 or eps < 0.0:
        raise DomainError("type2_bound needs nonnegative arguments")
    return 2.0 * k_value + eps


def old_bound(y_card: int, m: int, i_xz: float, c: float = 1.0) -> float:
    """Legacy exponential bound c * sqrt(|Y| / 2m) * 2^I(X;Z), bits.

    The constant c absorbs the unstated big-O factor; figure reproduction
    uses the plotted coefficients instead (see the figures module).
    """
    if m < 1:
        raise DomainError(f"m must be >= 1, got {m!r}")
    if y_card < 2:
        raise DomainError(f"y_card must be >= 2, got {y_card!r}")
    if c <= 0.0:
        raise DomainError(f"c must be positive, got {c!r}")
    return c * math.sqrt(y_card / (2.0 * m)) * 2.0 ** i_xz


def pinsker_delta_bound(cross_entropy_nats: float) -> float:
    """sqrt(H_cross / 2): total-variation cap from the cross-entropy loss
    when the true labels are deterministic."""
    if cross_entropy_nats < 0.0:
        raise DomainError(f"cross entropy must be nonnegative, got {cross_entropy_nats!r}")
    return math.sqrt(0.5 * cross_entropy_nats)


def thm3_exponent(zeta: float, eps: float) -> float:
    """Asymptotic tail exponent 4 zeta - 2 eps^2, nats per sample.

    Callers exponentiate as exp(m * exponent + o(m)); the exponent is
    negative exactly when eps > sqrt(2 zeta).
    """
    if not 0.0 <= zeta <= 1.0:
        raise DomainError(f"zeta must lie in [0,1], got {zeta!r}")
    if not 0.0 < eps < 1.0:
        raise DomainError(f"eps must lie in (0,1), got {eps!r}")
    return 4.0 * zeta - 2.0 * eps * eps


@dataclass(frozen=True)
class KModel:
    """Sample-complexity surrogate k(m') = min(k_c * m'^r, sqrt(m'))."""

    k_c: float
    r: float

    def __post_init__(self):
        if self.k_c < 0.0:
            raise DomainError(f"k_c must be nonnegative, got {self.k_c!r}")
        if not 0.0 <= self.r < 0.5:
            raise DomainError(f"r must lie in [0, 1/2), got {self.r!r}")

    def k(self, m_prime: int) -> float:
        return min(self.k_c * m_prime ** self.r, math.sqrt(m_prime))

    def delta_prime(self, m_prime: int) -> float:
        """k(m') / sqrt(m')."""
        return self.k(m_prime) / math.sqrt(m_prime)


def _log_thm4_term(m: int, y_card: int, eps: float, zeta: float,
                   k: KModel, m_prime: int) -> float:
    dp = k.delta_prime(m_prime)
    # The effective deviation eps - 2 k(m')/sqrt(m') is floored at zero before
    # squaring: a negative value would make the expression shrink below valid
    # probability estimates, while the floor keeps the oversmoothed regime
    # vacuous (bound clamps to one) as it should be.
    inner = max(0.0, eps - 2.0 * dp)
    return m_prime * y_card * LN2 - 2.0 * m * (inner * inner - 4.0 * zeta) + 2.0 * dp


def thm4_tail_bound(m: int, y_card: int, eps: float, zeta: float, k: KModel,
                    m_prime_max: int | None = None) -> tuple[float, int]:
    """Non-asymptotic tail bound, minimized over the inner sample size m'.

    Evaluates 2^(m'|Y|) exp(-2m((eps - 2k(m')/sqrt(m'))^2 - 4 zeta)
    + 2k(m')/sqrt(m')) for m' = 1..m_prime_max and returns the minimum
    (clamped to 1, it bounds a probability) together with its argmin so
    truncation hits are visible. Default cap: 10 ceil(sqrt(m)).
    """
    if m < 1:
        raise DomainError(f"m must be >= 1, got {m!r}")
    if y_card < 2:
        raise DomainError(f"y_card must be >= 2, got {y_card!r}")
    if eps < 0.0:
        raise DomainError(f"eps must be nonnegative, got {eps!r}")
    if zeta < 0.0:
        raise DomainError(f"zeta must be nonnegative, got {zeta!r}")
    if m_prime_max is None:
        m_prime_max = 10 * math.ceil(math.sqrt(m))
    if m_prime_max < 1:
        raise DomainError(f"m_prime_max must be >= 1, got {m_prime_max!r}")

    best_log = math.inf
    best_mp = 1
    for mp in range(1, m_prime_max + 1):
        lt = _log_thm4_term(m, y_card, eps, zeta, k, mp)
        if lt < best_log:
            best_log = lt
            best_mp = mp
    bound = 1.0 if best_log >= 0.0 else math.exp(best_log)
    return bound, best_mp


def invert_thm4_eps(m: int, y_card: int, zeta: float, k: KModel, nu: float,
                    m_prime_max: int | None = None, iters: int = 80) -> float:
    """Smallest eps with tail bound <= nu, by bisection on the monotone bound.

    This inversion backs the confidence-curve reconstruction; the source
    experiments report such a curve without spelling the inversion out.
    """
    if not 0.0 < nu < 1.0:
        raise DomainError(f"nu must lie in (0,1), got {nu!r}")
    lo, hi = 0.0, 1.0
    b_hi, _ = thm4_tail_bound(m, y_card, hi, zeta, k, m_prime_max)
    if b_hi > nu:
        return 1.0
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        b, _ = thm4_tail_bound(m, y_card, mid, zeta, k, m_prime_max)
        if b > nu:
            lo = mid
        else:
            hi = mid
    return hi


def insight_delta_bound(m: int, y_card: int, nu: float, zeta: float, k: KModel,
                        m_prime_max: int | None = None) -> float:
    """High-probability (1 - nu) cap on the population total variation:
    zeta + inf_m' sqrt((ln(1/nu) + m'|Y| ln 2) / 2m + d') + 2 d',
    with d' = k(m') / sqrt(m')."""
    if m < 1:
        raise DomainError(f"m must be >= 1, got {m!r}")
    if not 0.0 < nu < 1.0:
        raise DomainError(f"nu must lie in (0,1), got {nu!r}")
    if zeta < 0.0:
        raise DomainError(f"zeta must be nonnegative, got {zeta!r}")
    if m_prime_max is None:
        m_prime_max = 10 * math.ceil(math.sqrt(m))
    best = math.inf
    for mp in range(1, m_prime_max + 1):
        dp = k.delta_prime(mp)
        val = math.sqrt((math.log(1.0 / nu) + mp * y_card * LN2) / (2.0 * m) + dp) + 2.0 * dp
        best = min(best, val)
    return zeta + best


def fit_k_model(observations) -> KModel:
    """Least squares on ln k = ln k_c + r ln m'; r clamped into [0, 1/2).

    On clamping, the intercept is refit with the slope held fixed so the
    fitted curve still passes through the observations' center of mass.
    """
    obs = [(int(mp), float(kv)) for mp, kv in observations]
    if len(obs) < 2:
        raise InsufficientData(f"need at least 2 observations, got {len(obs)}")
    for mp, kv in obs:
        if mp < 1 or kv <= 0.0:
            raise InsufficientData(f"observations must be positive, got ({mp}, {kv})")
    lx = np.log([mp for mp, _ in obs])
    ly = np.log([kv for _, kv in obs])
    if np.ptp(lx) == 0.0:
        raise InsufficientData("observations share a single m'; slope is unidentified")
    r, log_kc = np.polyfit(lx, ly, 1)
    r = float(r)
    if not 0.0 <= r < 0.5:
        r = min(max(r, 0.0), 0.5 - 1e-12)
        log_kc = float(np.mean(ly - r * lx))
    return KModel(k_c=float(np.exp(log_kc)), r=r)


@dataclass(frozen=True)
class BoundReport:
    """One evaluation of the bits-valued bounds on shared inputs."""

    delta_bar: float
    i_xz: float
    h_x: float
    y_card: int
    m: int
    eps: float
    c: float
    thm1: float
    cor1: float
    type2: float
    old_bound: float

    def to_dict(self) -> dict:
        return {
            "inputs": {
                "delta_bar": self.delta_bar,
                "i_xz": self.i_xz,
                "h_x": self.h_x,
                "y_card": self.y_card,
                "m": self.m,
                "eps": self.eps,
                "c": self.c,
            },
            "thm1": self.thm1,
            "cor1": self.cor1,
            "type2": self.type2,
            "old_bound": self.old_bound,
        }


def bound_report(delta_bar: float, i_xz: float, h_x: float, y_card: int, m: int,
                 eps: float = 0.0, c: float = 1.0) -> BoundReport:
    t1 = thm1_bound(delta_bar, i_xz)
    return BoundReport(
        delta_bar=delta_bar, i_xz=i_xz, h_x=h_x, y_card=y_card, m=m, eps=eps, c=c,
        thm1=t1,
        cor1=cor1_bound(delta_bar, h_x),
        type2=type2_bound(t1, eps),
        old_bound=old_bound(y_card, m, i_xz, c),
    )
