"""Brute-force numeric oracles: the repo's anti-drift anchor.

Each oracle machine-checks one inequality or identity used by the bound
machinery, on explicit finite instances, against independent evaluation
(closed forms, exhaustive or randomized search). A counterexample is fatal:
it falsifies the implementation, so it raises instead of warning.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bounds import thm1_bound
from .dists import FiniteDist, random_cond, random_dist, random_model
from .errors import CounterexampleFound, DomainError
from .info import conditional_total_variation, model_info

EQUALITY_TOL = 1e-10
MINIMALITY_TOL = 1e-12
COUPLING_TOL = 1e-9
THM1_SLACK = 1e-9


@dataclass(frozen=True)
class OracleReport:
    name: str
    lhs: float
    rhs: float
    gap: float
    passed: bool
    instance: str

    def to_dict(self) -> dict:
        return {
            "name": self.name, "lhs": self.lhs, "rhs": self.rhs,
            "gap": self.gap, "pass": self.passed, "instance": self.instance,
        }


def gibbs_variational_oracle(weights: FiniteDist, h, grid_steps: int = 64,
                             seed: int = 0) -> OracleReport:
    """Check the exponential-tilting identity
    inf_g E[g (h + ln g)] = -ln E[e^{-h}] over densities g with E[g] = 1.

    The closed-form minimizer g* = e^{-(h+1)} / E[e^{-(h+1)}] is evaluated
    exactly and the identity asserted to 1e-10; grid_steps random feasible
    perturbations then probe minimality (none may improve by more than 1e-12).
    """
    h = np.asarray(h, dtype=np.float64)
    if h.shape != weights.probs.shape:
        raise DomainError(f"h has shape {h.shape}, weights have {weights.probs.shape}")
    if not np.all(np.isfinite(h)):
        raise DomainError("h must be bounded (finite entries)")
    w = weights.probs

    shifted = np.exp(-(h + 1.0))
    big_w = float(w @ shifted)
    g_star = shifted / big_w

    def objective(g):
        mask = g > 0.0
        return float(np.sum(w[mask] * g[mask] * (h[mask] + np.log(g[mask]))))

    lhs = objective(g_star)
    rhs = -math.log(float(w @ np.exp(-h)))
    gap = abs(lhs - rhs)

    rng = np.random.default_rng(seed)
    ok_min = True
    for step in range(grid_steps):
        if step % 2 == 0:
            # local perturbation around the minimizer, kept feasible
            noise = rng.standard_normal(h.shape)
            noise -= float(w @ noise)  # center under the weights
            g = np.maximum(g_star + 0.1 * noise, 0.0)
        else:
            g = rng.exponential(1.0, size=h.shape)
        mass = float(w @ g)
        if mass <= 0.0:
            continue
        g = g / mass
        if objective(g) < lhs - MINIMALITY_TOL:
            ok_min = False
            break

    passed = gap <= EQUALITY_TOL and ok_min
    return OracleReport(
        name="gibbs_variational", lhs=lhs, rhs=rhs, gap=gap, passed=passed,
        instance=f"n={len(weights)}, grid_steps={grid_steps}, seed={seed}",
    )


def jensen_sharpen_oracle(weights: FiniteDist, f) -> OracleReport:
    """Check ln E[e^{-2 f^2}] <= -2 E[f]^2 for f with range in [0, 1]."""
    f = np.asarray(f, dtype=np.float64)
    if f.shape != weights.probs.shape:
        raise DomainError(f"f has shape {f.shape}, weights have {weights.probs.shape}")
    if np.any(f < 0.0) or np.any(f > 1.0):
        raise DomainError("f must take values in [0, 1]")
    w = weights.probs
    lhs = math.log(float(w @ np.exp(-2.0 * f * f)))
    mean = float(w @ f)
    rhs = -2.0 * mean * mean
    gap = lhs - rhs  # negative is slack
    return OracleReport(
        name="jensen_sharpen", lhs=lhs, rhs=rhs, gap=gap,
        passed=lhs <= rhs + MINIMALITY_TOL, instance=f"n={len(weights)}",
    )


def gibbs_random_suite(instances: int, grid_steps: int = 64, seed: int = 0,
                       max_card: int = 12) -> dict:
    """Randomized gibbs oracle sweep; returns gap statistics."""
    gaps = []
    for i in range(instances):
        rng = np.random.default_rng(np.random.SeedSequence((seed, i)))
        n = int(rng.integers(2, max_card + 1))
        w = random_dist(rng, n)
        h = rng.uniform(-3.0, 3.0, size=n)
        rep = gibbs_variational_oracle(w, h, grid_steps=grid_steps, seed=int(rng.integers(2**32)))
        if not rep.passed:
            raise CounterexampleFound(f"gibbs oracle failed on instance {i}: {rep}")
        gaps.append(rep.gap)
    gaps = np.asarray(gaps)
    return {
        "instances": instances,
        "max_gap": float(gaps.max()),
        "median_gap": float(np.median(gaps)),
    }


def jensen_random_suite(instances: int, seed: int = 0, max_card: int = 12) -> dict:
    """Randomized sharpened-Jensen sweep, vectorized in batches."""
    rng = np.random.default_rng(seed)
    worst = -math.inf
    remaining = instances
    while remaining > 0:
        batch = min(remaining, 20000)
        n = int(rng.integers(2, max_card + 1))
        w = rng.dirichlet(np.ones(n), size=batch)
        f = rng.random((batch, n))
        lhs = np.log(np.sum(w * np.exp(-2.0 * f * f), axis=1))
        rhs = -2.0 * np.sum(w * f, axis=1) ** 2
        gaps = lhs - rhs
        bad = gaps > MINIMALITY_TOL
        if np.any(bad):
            i = int(np.argmax(gaps))
            raise CounterexampleFound(
                f"sharpened Jensen violated: lhs={lhs[i]!r} rhs={rhs[i]!r} "
                f"w={w[i].tolist()} f={f[i].tolist()}"
            )
        worst = max(worst, float(gaps.max()))
        remaining -= batch
    return {"instances": instances, "max_gap": worst}


@dataclass(frozen=True)
class ExhaustiveSummary:
    seeds: int
    max_card: int
    violations: int
    tightest_ratio: float
    tightest_instance: str

    def to_dict(self) -> dict:
        return {
            "seeds": self.seeds, "max_card": self.max_card,
            "violations": self.violations, "tightest_ratio": self.tightest_ratio,
            "tightest_instance": self.tightest_instance,
        }


def thm1_exhaustive(seeds: int, max_card: int = 8, base_seed: int = 0) -> ExhaustiveSummary:
    """Random (model, estimated conditional) pairs versus the product-form bound.

    Alternating instances use a spiky Dirichlet sampler so near-deterministic
    channels are represented. Any violation raises CounterexampleFound.
    """
    if max_card > 8:
        raise DomainError("exhaustive suite is limited to alphabets of size <= 8")
    tightest = 0.0
    tightest_desc = "none"
    for i in range(seeds):
        rng = np.random.default_rng(np.random.SeedSequence((base_seed, i)))
        alpha = 1.0 if i % 2 == 0 else 0.1  # stress: biased near-deterministic rows
        nx = int(rng.integers(2, max_card + 1))
        ny = int(rng.integers(2, max_card + 1))
        nz = int(rng.integers(2, max_card + 1))
        model = random_model(rng, nx, ny, nz, alpha=alpha)
        est = random_cond(rng, nx, ny, alpha=alpha)

        info_true = model_info(model)
        info_est = model_info(model.with_conditional(est))
        delta_bar = conditional_total_variation(model.p_x, model.p_y_given_x, est)
        loss = abs(info_true.i_yz - info_est.i_yz)
        bound = thm1_bound(delta_bar, info_true.i_xz)
        if loss > bound + THM1_SLACK:
            raise CounterexampleFound(
                f"instance {i}: type-1 loss {loss!r} exceeds bound {bound!r}"
            )
        if bound > 0.0 and loss / bound > tightest:
            tightest = loss / bound
            tightest_desc = (
                f"seed={i}, cards=({nx},{ny},{nz}), alpha={alpha}, "
                f"delta_bar={delta_bar:.6f}, i_xz={info_true.i_xz:.6f}"
            )
    return ExhaustiveSummary(
        seeds=seeds, max_card=max_card, violations=0,
        tightest_ratio=tightest, tightest_instance=tightest_desc,
    )


def _northwest_plan(p: np.ndarray, q: np.ndarray, perm_r, perm_c) -> np.ndarray:
    """Transportation-polytope vertex via the northwest-corner rule on
    permuted margins (a Birkhoff-style random extreme plan)."""
    n = p.shape[0]
    a = p[perm_r].copy()
    b = q[perm_c].copy()
    plan = np.zeros((n, n))
    i = j = 0
    while i < n and j < n:
        move = min(a[i], b[j])
        plan[perm_r[i], perm_c[j]] = move
        a[i] -= move
        b[j] -= move
        if a[i] <= 1e-15:
            i += 1
        if j < n and b[j] <= 1e-15:
            j += 1
    return plan


def maximal_coupling_search(p: FiniteDist, q: FiniteDist, restarts: int = 200,
                            seed: int = 0) -> float:
    """Search couplings of (p, q) for the least disagreement probability and
    assert none beats 1 - sum_y min(p_y, q_y).

    The search walks random northwest-corner vertices of the transportation
    polytope plus the diagonal-greedy plan that attains the optimum; for
    binary alphabets the one-parameter polytope is swept densely instead.
    """
    n = len(p)
    if n > 4 or len(q) != n:
        raise DomainError("search supports matching alphabets of size <= 4")
    target = 1.0 - float(np.minimum(p.probs, q.probs).sum())

    best = math.inf
    if n == 2:
        lo = max(0.0, p.probs[0] + q.probs[0] - 1.0)
        hi = min(p.probs[0], q.probs[0])
        for t in np.linspace(lo, hi, 401):
            diag = t + (1.0 - p.probs[0] - q.probs[0] + t)
            best = min(best, 1.0 - diag)
    rng = np.random.default_rng(seed)
    # diagonal-greedy plan: overlap on the diagonal, residuals northwest
    overlap_mass = np.minimum(p.probs, q.probs)
    plan = np.diag(overlap_mass)
    res_p = p.probs - overlap_mass
    res_q = q.probs - overlap_mass
    if res_p.sum() > 1e-15:
        plan += np.outer(res_p, res_q) / res_p.sum()
    best = min(best, 1.0 - float(np.trace(plan)))
    for _ in range(restarts):
        perm_r = rng.permutation(n)
        perm_c = rng.permutation(n)
        vert = _northwest_plan(p.probs, q.probs, perm_r, perm_c)
        best = min(best, 1.0 - float(np.trace(vert)))

    if best < target - COUPLING_TOL:
        raise CounterexampleFound(
            f"alternative coupling disagreement {best!r} beats the construction "
            f"value {target!r}"
        )
    return best


def coupling_search_suite(pairs: int, restarts: int = 200, seed: int = 0) -> dict:
    """Randomized maximal-coupling optimality sweep over small alphabets."""
    worst_slack = math.inf
    for i in range(pairs):
        rng = np.random.default_rng(np.random.SeedSequence((seed, i)))
        n = int(rng.integers(2, 5))
        p = random_dist(rng, n)
        q = random_dist(rng, n)
        target = 1.0 - float(np.minimum(p.probs, q.probs).sum())
        found = maximal_coupling_search(p, q, restarts=restarts, seed=int(rng.integers(2**32)))
        worst_slack = min(worst_slack, found - target)
    return {"pairs": pairs, "worst_slack": worst_slack}


def verify_all(seeds: int = 1000, seed: int = 0) -> tuple[list[OracleReport], bool]:
    """Run every oracle suite; returns per-suite reports and the overall verdict.

    A CounterexampleFound inside one suite becomes a failed row rather than
    aborting the table, so every suite always reports.
    """
    reports = []

    def run(name, thunk):
        try:
            reports.append(thunk())
        except CounterexampleFound as exc:
            reports.append(OracleReport(
                name=name, lhs=math.nan, rhs=math.nan, gap=math.inf,
                passed=False, instance=f"counterexample: {exc}",
            ))

    def _gibbs():
        g = gibbs_random_suite(min(seeds, 1000), grid_steps=32, seed=seed)
        return OracleReport(
            name="gibbs_variational_suite", lhs=g["max_gap"], rhs=EQUALITY_TOL,
            gap=g["max_gap"], passed=g["max_gap"] <= EQUALITY_TOL,
            instance=f"instances={g['instances']}, median_gap={g['median_gap']:.3e}",
        )

    def _jensen():
        j = jensen_random_suite(max(seeds * 10, 10000), seed=seed)
        return OracleReport(
            name="jensen_sharpen_suite", lhs=j["max_gap"], rhs=MINIMALITY_TOL,
            gap=max(j["max_gap"], 0.0), passed=j["max_gap"] <= MINIMALITY_TOL,
            instance=f"instances={j['instances']}",
        )

    def _thm1():
        t = thm1_exhaustive(seeds, max_card=8, base_seed=seed)
        return OracleReport(
            name="thm1_exhaustive", lhs=t.tightest_ratio, rhs=1.0,
            gap=1.0 - t.tightest_ratio, passed=t.violations == 0,
            instance=t.tightest_instance,
        )

    def _coupling():
        c = coupling_search_suite(min(seeds, 200), restarts=200, seed=seed)
        return OracleReport(
            name="maximal_coupling_search", lhs=c["worst_slack"], rhs=0.0,
            gap=abs(min(c["worst_slack"], 0.0)),
            passed=c["worst_slack"] >= -COUPLING_TOL,
            instance=f"pairs={c['pairs']}",
        )

    run("gibbs_variational_suite", _gibbs)
    run("thm1_exhaustive", _thm1)
    run("maximal_coupling_search", _coupling)
    run("jensen_sharpen_suite", _jensen)

    return reports, all(r.passed for r in reports)
