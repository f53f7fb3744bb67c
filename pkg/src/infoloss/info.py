"""Exact information quantities on finite models.

Unit convention: entropies and mutual informations are reported in bits;
KL divergence and cross entropy are carried in nats (they feed the
natural-log tail machinery). The single bits/nats boundary lives in
``kernels``, where each sum converts once through ln 2.
"""

from __future__ import annotations

import math

import numpy as np

from . import kernels
from .dists import CondDist, FiniteDist, FullModel, InfoReport, JointXY
from .errors import DomainError, ShapeMismatch, SupportMismatch


def validate(dist: FiniteDist) -> FiniteDist:
    """Return the input if its invariants hold (construction already checks)."""
    FiniteDist(np.array(dist.probs))
    return dist


def entropy(dist: FiniteDist) -> float:
    """H(p) = -sum p log2 p, with 0 log 0 := 0."""
    return kernels.entropy_bits(dist.probs)


def binary_entropy(t: float) -> float:
    """h2(t) in bits; symmetric about 1/2, zero at the endpoints."""
    if not 0.0 <= t <= 1.0:
        raise DomainError(f"binary_entropy requires t in [0,1], got {t!r}")
    if t == 0.0 or t == 1.0:
        return 0.0
    return -t * math.log2(t) - (1.0 - t) * math.log2(1.0 - t)


def mutual_information(joint: JointXY) -> float:
    """I(X;Y) of a joint table, in bits; zero iff the table is a product."""
    return kernels.joint_mi_bits(joint.table)


def kl_divergence(p: FiniteDist, q: FiniteDist) -> float:
    """KL(p || q) in nats; requires supp(p) within supp(q)."""
    if len(p) != len(q):
        raise ShapeMismatch(f"alphabets differ: {len(p)} vs {len(q)}")
    bad = (p.probs > 0.0) & (q.probs == 0.0)
    if np.any(bad):
        raise SupportMismatch(
            f"q has zero mass at index {int(np.argmax(bad))} where p is positive"
        )
    return kernels.kl_nats(p.probs, q.probs)


def conditional_total_variation(p_x: FiniteDist, p: CondDist, q: CondDist) -> float:
    """Average conditional total variation E_px[ (1/2) sum_y |p - q| ]."""
    if p.rows.shape != q.rows.shape:
        raise ShapeMismatch(f"conditional shapes differ: {p.rows.shape} vs {q.rows.shape}")
    if len(p_x) != p.n_cond:
        raise ShapeMismatch(f"p_x has {len(p_x)} symbols, conditionals have {p.n_cond} rows")
    return kernels.cond_tv(p_x.probs, p.rows, q.rows)


def conditional_cross_entropy(p_x: FiniteDist, truth: CondDist, est: CondDist) -> float:
    """Conditional cross entropy -E_px E_truth[ln est], in nats.

    The estimate must be strictly positive wherever the truth puts mass on an
    x with positive weight; a realized label with zero estimated mass is a
    SupportMismatch, not an infinity.
    """
    if truth.rows.shape != est.rows.shape:
        raise ShapeMismatch(f"conditional shapes differ: {truth.rows.shape} vs {est.rows.shape}")
    if len(p_x) != truth.n_cond:
        raise ShapeMismatch(f"p_x has {len(p_x)} symbols, conditionals have {truth.n_cond} rows")
    active = p_x.probs > 0.0
    bad = active[:, None] & (truth.rows > 0.0) & (est.rows == 0.0)
    if np.any(bad):
        a, b = np.unravel_index(int(np.argmax(bad)), bad.shape)
        raise SupportMismatch(f"estimate assigns zero mass to realized label (x={a}, y={b})")
    return kernels.cond_ce_nats(p_x.probs, truth.rows, est.rows)


def model_info(model: FullModel) -> InfoReport:
    """All InfoReport fields by exact summation over the (X,Y,Z) cube."""
    if model.p_z_given_x is None:
        raise DomainError("model_info requires a z-channel")
    i_xy, i_xz, i_yz, i_yz_x = kernels.model_mis(
        model.p_x.probs, model.p_y_given_x.rows, model.p_z_given_x.rows
    )
    h_x = kernels.entropy_bits(model.p_x.probs)
    h_y = kernels.entropy_bits(model.joint_xy().table.sum(axis=0))
    return InfoReport(h_x=h_x, h_y=h_y, i_xy=i_xy, i_xz=i_xz, i_yz=i_yz,
                      i_yz_given_x=i_yz_x)


def fano_error_lower_bound(h_y: float, i_yz: float, y_card: int) -> float:
    """Smallest error rate P_e allowed by h2(P_e) + P_e log2(|Y|-1) >= H(Y) - I(Y;Z).

    The left side increases monotonically on [0, 1 - 1/|Y|], so the smallest
    feasible P_e is the bisection root there; a nonpositive right side means
    the constraint is vacuous and 0 is returned.
    """
    if y_card < 2:
        raise DomainError(f"fano inversion needs y_card >= 2, got {y_card}")
    if i_yz < -1e-12 or h_y < -1e-12:
        raise DomainError("entropies and informations must be nonnegative")
    if i_yz > h_y + 1e-9:
        raise DomainError(f"i_yz={i_yz!r} exceeds h_y={h_y!r}")
    rhs = h_y - i_yz
    if rhs <= 0.0:
        return 0.0
    p_max = 1.0 - 1.0 / y_card
    log_k = math.log2(y_card - 1)

    def lhs(p: float) -> float:
        return binary_entropy(p) + p * log_k

    top = lhs(p_max)
    if rhs > top + 1e-9:
        raise DomainError(
            f"right side {rhs!r} exceeds the maximum {top!r} of the Fano left side"
        )
    if rhs >= top:
        return p_max
    lo, hi = 0.0, p_max
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if lhs(mid) < rhs:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
