"""Conditional maximal coupling of two label conditionals sharing p(x).

Two product models p(x)p(y|x) and p(x)q(y|x) are coupled so that both chains
see the same feature draw: a Bernoulli switch J with success probability
rho = E_px[ sum_y min(p(y|x), q(y|x)) ] picks, per x, either the shared
overlap component (both labels equal) or the two disjoint residual
components. Sharing x across the branches is what makes the disagreement
probability hit the conditional total variation exactly; the residual label
components have disjoint support for every fixed x, so P(Ytilde != Yhat)
equals 1 - rho with no cross terms.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dists import CondDist, FiniteDist, JointXY
from .errors import NegativeMass, ShapeMismatch
from .info import conditional_total_variation

# Below this residual mass the 1/(1-rho) components are numerically undefined
# and the coupling degenerates to the diagonal.
DEGENERATE_TOL = 1e-13

# Entrywise residuals p - min(p, q) may round to tiny negatives; anything
# worse is a real defect.
CLAMP_TOL = 1e-15


@dataclass(frozen=True)
class OverlapTable:
    """Entrywise minimum m(x, y) = min(p(y|x), q(y|x))."""

    table: np.ndarray


@dataclass(frozen=True)
class CouplingResult:
    rho: float
    u: JointXY | None
    v: JointXY | None
    w: JointXY | None
    gamma: np.ndarray  # (2, nx, ny, nx, ny); axis 0 is the switch J
    degenerate: bool


@dataclass(frozen=True)
class CheckResult:
    name: str
    ok: bool
    gap: float
    tol: float


@dataclass(frozen=True)
class VerificationReport:
    checks: tuple[CheckResult, ...]

    @property
    def passed(self) -> bool:
        return all(c.ok for c in self.checks)

    def failing(self) -> list[str]:
        return [c.name for c in self.checks if not c.ok]

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "checks": [
                {"name": c.name, "ok": c.ok, "gap": c.gap, "tol": c.tol}
                for c in self.checks
            ],
        }


def overlap(p: CondDist, q: CondDist) -> OverlapTable:
    """m(a, b) = min(p(b|a), q(b|a)), entrywise."""
    if p.rows.shape != q.rows.shape:
        raise ShapeMismatch(f"conditional shapes differ: {p.rows.shape} vs {q.rows.shape}")
    return OverlapTable(np.minimum(p.rows, q.rows))


def _residual(rows: np.ndarray, m: np.ndarray) -> np.ndarray:
    res = rows - m
    bad = res < -CLAMP_TOL
    if np.any(bad):
        a, b = np.unravel_index(int(np.argmin(res)), res.shape)
        raise NegativeMass((int(a), int(b)), float(res[a, b]))
    return np.maximum(res, 0.0)


def build_coupling(p_x: FiniteDist, p: CondDist, q: CondDist) -> CouplingResult:
    """Assemble rho, the U/V/W component joints, and the full switch joint gamma.

    gamma is indexed (J, Xtilde, Ytilde, Xhat, Yhat). The J=1 slice carries
    p(x) m(x, y) on the double diagonal; the J=0 slice carries, per shared x,
    the product of the two normalized residual label distributions.
    """
    if p.rows.shape != q.rows.shape:
        raise ShapeMismatch(f"conditional shapes differ: {p.rows.shape} vs {q.rows.shape}")
    if len(p_x) != p.n_cond:
        raise ShapeMismatch(f"p_x has {len(p_x)} symbols, conditionals have {p.n_cond} rows")

    nx, ny = p.rows.shape
    px = p_x.probs
    m = np.minimum(p.rows, q.rows)
    res_p = _residual(p.rows, m)
    res_q = _residual(q.rows, m)

    overlap_mass = m.sum(axis=1)          # per-x probability the labels agree
    rho = float(px @ overlap_mass)
    one_minus_rho = float(px @ (0.5 * (res_p + res_q).sum(axis=1)))

    gamma = np.zeros((2, nx, ny, nx, ny))
    idx = np.arange(nx)
    gamma[1, idx[:, None], np.arange(ny)[None, :], idx[:, None], np.arange(ny)[None, :]] = (
        px[:, None] * m
    )

    delta_x = 0.5 * (res_p.sum(axis=1) + res_q.sum(axis=1))
    for a in range(nx):
        if px[a] <= 0.0 or delta_x[a] <= DEGENERATE_TOL:
            continue
        gamma[0, a, :, a, :] = px[a] * np.outer(res_p[a], res_q[a]) / delta_x[a]

    degenerate = one_minus_rho <= DEGENERATE_TOL or rho <= DEGENERATE_TOL

    u = None
    if rho > DEGENERATE_TOL:
        u = JointXY(px[:, None] * m / rho)
    v = w = None
    if one_minus_rho > DEGENERATE_TOL:
        v = JointXY(px[:, None] * res_p / one_minus_rho)
        w = JointXY(px[:, None] * res_q / one_minus_rho)

    return CouplingResult(rho=rho, u=u, v=v, w=w, gamma=gamma, degenerate=degenerate)


def verify_coupling(c: CouplingResult, p_x: FiniteDist, p: CondDist,
                    q: CondDist, tol: float = 1e-12) -> VerificationReport:
    """Machine-check the coupling against its defining identities.

    (a) the (Xtilde, Ytilde) marginal is p(x)p(y|x);
    (b) the (Xhat, Yhat) marginal is p(x)q(y|x);
    (c) 1 - rho equals the average conditional total variation;
    (d) the gamma-probability of label disagreement equals 1 - rho.
    Failures are collected, never raised.
    """
    px = p_x.probs
    marg_true = c.gamma.sum(axis=(0, 3, 4))
    marg_est = c.gamma.sum(axis=(0, 1, 2))
    gap_a = float(np.max(np.abs(marg_true - px[:, None] * p.rows)))
    gap_b = float(np.max(np.abs(marg_est - px[:, None] * q.rows)))

    delta_bar = conditional_total_variation(p_x, p, q)
    gap_c = abs((1.0 - c.rho) - delta_bar)

    p_agree = float(np.einsum("jabcb->", c.gamma))
    p_disagree = float(c.gamma.sum() - p_agree)
    gap_d = abs(p_disagree - (1.0 - c.rho))

    checks = (
        CheckResult("true_marginal", gap_a <= tol, gap_a, tol),
        CheckResult("estimated_marginal", gap_b <= tol, gap_b, tol),
        CheckResult("one_minus_rho_equals_tv", gap_c <= tol, gap_c, tol),
        CheckResult("disagreement_equals_one_minus_rho", gap_d <= tol, gap_d, tol),
    )
    return VerificationReport(checks=checks)


@dataclass(frozen=True)
class ExtendedCoupling:
    """Coupling extended with the shared representation channel.

    table is indexed (J, Xtilde, Ytilde, Ztilde, Xhat, Yhat, Zhat).
    """

    table: np.ndarray

    def marginal_true(self) -> np.ndarray:
        """(Xtilde, Ytilde, Ztilde) cube."""
        return self.table.sum(axis=(0, 4, 5, 6))

    def marginal_est(self) -> np.ndarray:
        """(Xhat, Yhat, Zhat) cube."""
        return self.table.sum(axis=(0, 1, 2, 3))


def coupled_z_extension(c: CouplingResult, channel: CondDist) -> ExtendedCoupling:
    """Draw Ztilde from the channel row of Xtilde and Zhat from Xhat's row,
    conditionally independently given the pair of features."""
    nx = c.gamma.shape[1]
    if channel.n_cond != nx:
        raise ShapeMismatch(f"channel has {channel.n_cond} rows, expected {nx}")
    table = np.einsum("jabcd,ae,cf->jabecdf", c.gamma, channel.rows, channel.rows)
    return ExtendedCoupling(table=table)
