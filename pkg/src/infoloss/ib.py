"""Information-bottleneck solver on finite joints.

The constrained program (maximize relevance at fixed compression) is run in
its Lagrangian form: self-consistent iterations over p(z|x) with

    p(z|x)  proportional to  p(z) * exp(-beta * KL(p(y|x) || p(y|z)))

so the frontier is traced by sweeping beta and reading off I(X;Z). Larger
beta buys more relevance; beta = 0 collapses the representation.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .dists import CondDist, JointXY
from .errors import CurveMismatch, DomainError
from .info import conditional_total_variation

_KL_INF = 1e300  # stands in for +inf inside exp(-beta * kl)


@dataclass(frozen=True)
class IBSolution:
    channel: CondDist          # p(z|x)
    i_xz: float                # bits
    i_yz: float                # bits
    beta: float
    converged: bool
    iterations: int
    objective: float           # i_yz - i_xz / beta (relevance minus penalty)
    eps_subopt: float          # last-two-iterate objective delta


@dataclass(frozen=True)
class Type2Point:
    i_xz: float          # compression level of the matched pair (true side)
    loss2: float         # I(Y;Z*) - I(Y;Zhat), the hat channel read under truth
    i_yz_star: float
    i_yz_hat: float
    beta_star: float
    beta_hat: float


def _objective(beta: float, i_xz: float, i_yz: float) -> float:
    if beta > 0.0:
        return i_yz - i_xz / beta
    return 0.0 if i_xz <= 1e-12 else -math.inf


def _channel_mis(joint: np.ndarray, px: np.ndarray, channel: np.ndarray):
    """(i_xz, i_yz) in bits of a channel wired to the given (x, y) joint."""
    i_xz = kernels.joint_mi_bits(px[:, None] * channel)
    pyz = joint.T @ channel
    i_yz = kernels.joint_mi_bits(np.ascontiguousarray(pyz))
    return i_xz, i_yz


def _ib_step(joint, px, pyx, channel, beta):
    pz = px @ channel
    alive = pz > 0.0
    # decoder p(y|z) on live clusters
    pyz = joint.T @ channel               # (ny, nz)
    dec = np.zeros_like(pyz)
    dec[:, alive] = pyz[:, alive] / pz[alive]

    # kl[x, z] = KL(p(y|x) || p(y|z)), +inf where the decoder misses support
    kl = np.full((px.shape[0], channel.shape[1]), _KL_INF)
    for z in np.nonzero(alive)[0]:
        col = dec[:, z]
        ok = True
        vals = np.zeros(px.shape[0])
        for x in range(px.shape[0]):
            row = pyx[x]
            mask = row > 0.0
            if np.any(col[mask] == 0.0):
                vals[x] = _KL_INF
            else:
                vals[x] = float(np.sum(row[mask] * np.log(row[mask] / col[mask])))
        kl[:, z] = vals

    scores = np.where(alive[None, :], -beta * kl, -np.inf)
    with np.errstate(divide="ignore"):
        scores = scores + np.where(alive, np.log(pz), -np.inf)[None, :]
    scores -= scores.max(axis=1, keepdims=True)
    new = np.exp(scores)
    new /= new.sum(axis=1, keepdims=True)
    return new


def ib_solve(joint: JointXY, beta: float, z_card: int, tol: float = 1e-10,
             max_iter: int = 2000, seed: int = 0) -> IBSolution:
    """Fixed-point iterations from a seeded random channel.

    Converged means successive channels differ by less than tol in average
    conditional total variation. Hitting max_iter is not an error: the best
    iterate seen is returned with converged=False.
    """
    if z_card < 1:
        raise DomainError(f"z_card must be >= 1, got {z_card!r}")
    if beta < 0.0:
        raise DomainError(f"beta must be >= 0, got {beta!r}")
    table = joint.table
    px = table.sum(axis=1)
    pyx = table / px[:, None]
    rng = np.random.default_rng(seed)
    channel = rng.dirichlet(np.ones(z_card), size=px.shape[0])
    channel /= channel.sum(axis=1, keepdims=True)

    p_x_dist = joint.marginal_x()
    prev_obj = _objective(beta, *_channel_mis(table, px, channel))
    best = (prev_obj, channel, 0)
    converged = False
    it = 0
    obj = prev_obj
    for it in range(1, max_iter + 1):
        new = _ib_step(table, px, pyx, channel, beta)
        step_tv = conditional_total_variation(p_x_dist, CondDist(channel), CondDist(new))
        channel = new
        obj = _objective(beta, *_channel_mis(table, px, channel))
        if obj > best[0]:
            best = (obj, channel, it)
        if step_tv < tol:
            converged = True
            break
        prev_obj = obj

    if not converged:
        channel = best[1]
        obj = best[0]
    i_xz, i_yz = _channel_mis(table, px, channel)
    return IBSolution(
        channel=CondDist(channel), i_xz=i_xz, i_yz=i_yz, beta=beta,
        converged=converged, iterations=it,
        objective=obj, eps_subopt=abs(obj - prev_obj),
    )


def ib_curve(joint: JointXY, beta_grid, z_card: int, restarts: int = 4,
             seed: int = 0, tol: float = 1e-10, max_iter: int = 2000) -> list[IBSolution]:
    """Best-of-restarts solution per beta, returned sorted by i_xz."""
    betas = list(beta_grid)
    if sorted(betas) != betas:
        raise DomainError("beta_grid must be sorted ascending")
    if restarts < 1:
        raise DomainError(f"restarts must be >= 1, got {restarts!r}")
    out = []
    for j, beta in enumerate(betas):
        best = None
        for r in range(restarts):
            sub_seed = int(np.random.SeedSequence((seed, j, r)).generate_state(1)[0])
            sol = ib_solve(joint, beta, z_card, tol=tol, max_iter=max_iter, seed=sub_seed)
            if best is None or sol.objective > best.objective:
                best = sol
        out.append(best)
    return sorted(out, key=lambda s: s.i_xz)


def type2_loss_measured(joint: JointXY, est: CondDist, beta_grid, z_card: int,
                        restarts: int = 4, seed: int = 0,
                        align_tol: float = 0.05) -> list[Type2Point]:
    """Relevance gap between the true-optimal and estimated-optimal channels.

    Solves the frontier twice (true joint; p(x) times the estimated
    conditional), pairs points by nearest i_xz, and reads the estimated
    channel's relevance under the TRUE joint. Pairs further apart than
    align_tol bits are dropped; no pair at all is a CurveMismatch.
    """
    px = joint.table.sum(axis=1)
    if est.rows.shape != joint.table.shape:
        raise DomainError(
            f"estimated conditional shape {est.rows.shape} does not match joint "
            f"{joint.table.shape}"
        )
    est_joint = JointXY(px[:, None] * est.rows)
    curve_true = ib_curve(joint, beta_grid, z_card, restarts, seed)
    curve_est = ib_curve(est_joint, beta_grid, z_card, restarts, seed)

    points = []
    for sol in curve_true:
        partner = min(curve_est, key=lambda s: abs(s.i_xz - sol.i_xz))
        if abs(partner.i_xz - sol.i_xz) > align_tol:
            continue
        _, i_yz_hat = _channel_mis(joint.table, px, np.array(partner.channel.rows))
        points.append(Type2Point(
            i_xz=sol.i_xz,
            loss2=sol.i_yz - i_yz_hat,
            i_yz_star=sol.i_yz,
            i_yz_hat=i_yz_hat,
            beta_star=sol.beta,
            beta_hat=partner.beta,
        ))
    if not points:
        raise CurveMismatch(
            f"no compression levels aligned within {align_tol} bits between the curves"
        )
    return points


# ---------------------------------------------------------------------------
# exhaustive small-alphabet search (certificates and test oracle)
# ---------------------------------------------------------------------------

def simplex_mesh(dim: int, resolution: float) -> np.ndarray:
    """All probability vectors on a uniform mesh of the (dim-1)-simplex."""
    steps = round(1.0 / resolution)
    grids = []
    for combo in itertools.product(range(steps + 1), repeat=dim - 1):
        if sum(combo) <= steps:
            grids.append([c / steps for c in combo] + [1.0 - sum(combo) / steps])
    return np.asarray(grids, dtype=np.float64)


def grid_channels(n_cond: int, z_card: int, resolution: float) -> np.ndarray:
    """Cartesian product of simplex meshes: all (n_cond, z_card) channels.

    Exhaustive, so intended for alphabets of size at most 3.
    """
    mesh = simplex_mesh(z_card, resolution)
    idx = np.array(list(itertools.product(range(mesh.shape[0]), repeat=n_cond)))
    return mesh[idx]  # (n_channels, n_cond, z_card)


def grid_mis(joint: JointXY, channels: np.ndarray):
    """(i_xz, i_yz) arrays in bits for a batch of channels, vectorized."""
    table = joint.table
    px = table.sum(axis=1)
    pxz = px[None, :, None] * channels
    pz = pxz.sum(axis=1)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = pxz / (px[None, :, None] * pz[:, None, :])
        terms = np.where(pxz > 0.0, pxz * np.log2(np.where(pxz > 0.0, ratio, 1.0)), 0.0)
    i_xz = terms.sum(axis=(1, 2))

    pyz = np.einsum("xy,nxz->nyz", table, channels)
    py = table.sum(axis=0)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = pyz / (py[None, :, None] * pz[:, None, :])
        terms = np.where(pyz > 0.0, pyz * np.log2(np.where(pyz > 0.0, ratio, 1.0)), 0.0)
    i_yz = terms.sum(axis=(1, 2))
    return i_xz, i_yz


def grid_certificate(sol: IBSolution, joint: JointXY, resolution: float = 0.01) -> float:
    """Suboptimality of a solution against the exhaustive channel grid at its beta.

    max(0, best grid objective - solution objective); the small-alphabet
    refinement of the iterate-delta certificate.
    """
    channels = grid_channels(joint.table.shape[0], sol.channel.n_target, resolution)
    i_xz, i_yz = grid_mis(joint, channels)
    if sol.beta > 0.0:
        objs = i_yz - i_xz / sol.beta
    else:
        objs = np.where(i_xz <= 1e-12, 0.0, -np.inf)
    return max(0.0, float(objs.max()) - sol.objective)
