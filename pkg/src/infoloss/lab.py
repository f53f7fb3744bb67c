"""Sampling laboratory: finite-model learners, exact per-trial losses, and
tail-frequency measurement against the non-asymptotic theory.

Ground truth is always a known finite model, so the population total
variation of a fitted conditional is computed exactly instead of estimated.
Per-trial RNG streams are derived from (base_seed, m, trial_index) through
SeedSequence, making trials embarrassingly parallel and order-independent.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass

import numpy as np

from .bounds import KModel, fit_k_model, thm1_bound
from .dists import CondDist, FiniteDist, FullModel, load_model
from .errors import ConfigError, CounterexampleFound, DomainError
from .info import conditional_total_variation, model_info

LN2 = math.log(2.0)
WILSON_Z = 1.959963984540054  # 95% two-sided normal quantile


@dataclass(frozen=True)
class TrialRecord:
    m: int
    seed: int
    delta_bar: float
    zeta: float
    i_loss_1: float
    thm1_value: float
    learner: str
    hyp_violation_rate: float = 0.0  # fit-closer-to-empirical check on the sample support


@dataclass(frozen=True)
class TailEstimate:
    m: int
    eps: float
    trials: int
    freq: float
    wilson_hi: float


# ---------------------------------------------------------------------------
# learners
# ---------------------------------------------------------------------------

class Learner:
    """A deterministic map from weighted datasets to label conditionals.

    fit returns a row-stochastic (x_card, y_card) conditional covering the
    full feature alphabet; rows for unseen symbols default to uniform.
    """

    descriptor: str

    def fit(self, xs, ys, x_card: int, y_card: int, weights=None) -> CondDist:
        raise NotImplementedError


class _PluginLearner(Learner):
    def __init__(self, alpha: float):
        if alpha < 0.0:
            raise DomainError(f"smoothing alpha must be >= 0, got {alpha!r}")
        self.alpha = alpha
        self.descriptor = f"plugin(alpha={alpha:g})"

    def fit(self, xs, ys, x_card, y_card, weights=None):
        counts = _weighted_counts(xs, ys, x_card, y_card, weights)
        row_tot = counts.sum(axis=1)
        denom = row_tot + self.alpha * y_card
        rows = np.full((x_card, y_card), 1.0 / y_card)
        seen = denom > 0.0
        # no renormalization: at alpha=0 the fit must equal the empirical
        # conditional bit for bit, so the training TV is exactly zero
        rows[seen] = (counts[seen] + self.alpha) / denom[seen, None]
        return CondDist(rows)


class _SoftmaxGDLearner(Learner):
    def __init__(self, steps: int, lr: float, init_seed: int, init_scale: float = 0.0):
        if steps < 1:
            raise DomainError(f"steps must be >= 1, got {steps!r}")
        if lr < 0.0:
            raise DomainError(f"lr must be >= 0, got {lr!r}")
        self.steps = steps
        self.lr = lr
        self.init_seed = init_seed
        self.init_scale = init_scale
        self.descriptor = f"softmax_gd(steps={steps},lr={lr:g},init_seed={init_seed})"

    def fit(self, xs, ys, x_card, y_card, weights=None):
        # One-hot features make the model one logit row per symbol; full-batch
        # cross-entropy gradients then depend on the data only through the
        # weighted count table.
        counts = _weighted_counts(xs, ys, x_card, y_card, weights)
        total = counts.sum()
        if total <= 0.0:
            raise DomainError("dataset carries no mass")
        counts = counts / total
        row_tot = counts.sum(axis=1)

        if self.init_scale > 0.0:
            rng = np.random.default_rng(self.init_seed)
            w = self.init_scale * rng.standard_normal((x_card, y_card))
        else:
            w = np.zeros((x_card, y_card))  # uniform rows, incl. unseen symbols
        for _ in range(self.steps):
            probs = _softmax_rows(w)
            grad = row_tot[:, None] * probs - counts
            w = w - self.lr * grad
        return CondDist(_softmax_rows(w))


def _softmax_rows(w):
    z = w - w.max(axis=1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=1, keepdims=True)


def _weighted_counts(xs, ys, x_card, y_card, weights):
    xs = np.asarray(xs, dtype=np.int64)
    ys = np.asarray(ys, dtype=np.int64)
    if xs.shape != ys.shape:
        raise DomainError("xs and ys lengths differ")
    counts = np.zeros((x_card, y_card))
    if weights is None:
        np.add.at(counts, (xs, ys), 1.0)
    else:
        w = np.asarray(weights, dtype=np.float64)
        if w.shape != xs.shape:
            raise DomainError("weights length differs from dataset length")
        np.add.at(counts, (xs, ys), w)
    return counts


def plugin_learner(alpha: float = 0.0) -> Learner:
    """Smoothed conditional-frequency estimator; alpha=0 interpolates."""
    return _PluginLearner(alpha)


def softmax_gd_learner(steps: int, lr: float, init_seed: int = 0,
                       init_scale: float = 0.0) -> Learner:
    """Linear-softmax model trained by exactly `steps` full-batch GD steps.

    The default zero initialization keeps unseen-symbol rows exactly uniform;
    init_scale > 0 switches to a seeded Gaussian initialization.
    """
    return _SoftmaxGDLearner(steps, lr, init_seed, init_scale)


def build_learner(spec: dict) -> Learner:
    """Construct a learner from an experiment-config fragment."""
    if "kind" not in spec:
        raise ConfigError("learner config is missing required key 'kind'")
    kind = spec["kind"]
    params = {k: v for k, v in spec.items() if k != "kind"}
    if kind == "plugin":
        allowed = {"alpha"}
        _reject_unknown(params, allowed, "learner")
        return plugin_learner(float(params.get("alpha", 0.0)))
    if kind == "softmax_gd":
        allowed = {"steps", "lr", "init_seed", "init_scale"}
        _reject_unknown(params, allowed, "learner")
        return softmax_gd_learner(
            int(params.get("steps", 200)),
            float(params.get("lr", 0.5)),
            int(params.get("init_seed", 0)),
            float(params.get("init_scale", 0.0)),
        )
    raise ConfigError(f"unknown learner kind {kind!r}")


def _reject_unknown(params, allowed, where):
    unknown = set(params) - allowed
    if unknown:
        raise ConfigError(f"unknown {where} config key {sorted(unknown)[0]!r}")


# ---------------------------------------------------------------------------
# sampling and per-trial measurement
# ---------------------------------------------------------------------------

def sample_dataset(model: FullModel, m: int, seed) -> tuple[np.ndarray, np.ndarray]:
    """m i.i.d. (x, y) draws from p(x) p(y|x); deterministic given the seed."""
    if m < 1:
        raise DomainError(f"m must be >= 1, got {m!r}")
    rng = np.random.default_rng(seed)
    xs = rng.choice(model.x_card, size=m, p=model.p_x.probs)
    u = rng.random(m)
    cum = np.cumsum(model.p_y_given_x.rows, axis=1)
    ys = (u[:, None] >= cum[xs]).sum(axis=1)
    ys = np.minimum(ys, model.y_card - 1)
    return xs.astype(np.int64), ys.astype(np.int64)


def training_zeta(dataset, learned: CondDist) -> float:
    """Conditional total variation between the dataset's empirical
    conditionals and the fitted rows, weighted by empirical x-frequency."""
    xs, ys = dataset
    counts = _weighted_counts(xs, ys, learned.n_cond, learned.n_target, None)
    m = counts.sum()
    row_tot = counts.sum(axis=1)
    zeta = 0.0
    for x in np.nonzero(row_tot)[0]:
        emp = counts[x] / row_tot[x]
        zeta += (row_tot[x] / m) * 0.5 * float(np.abs(emp - learned.rows[x]).sum())
    return float(zeta)


def _hypothesis_violation_rate(dataset, learned: CondDist, truth: CondDist) -> float:
    """Fraction of sampled feature symbols where the fit sits closer to the
    population conditional than to the empirical one (the tail analysis
    assumes the opposite, so this is logged rather than assumed)."""
    xs, ys = dataset
    counts = _weighted_counts(xs, ys, learned.n_cond, learned.n_target, None)
    row_tot = counts.sum(axis=1)
    support = np.nonzero(row_tot)[0]
    viol = 0
    for x in support:
        emp = counts[x] / row_tot[x]
        tv_emp = 0.5 * float(np.abs(learned.rows[x] - emp).sum())
        tv_pop = 0.5 * float(np.abs(learned.rows[x] - truth.rows[x]).sum())
        if tv_emp > tv_pop + 1e-12:
            viol += 1
    return viol / len(support)


def run_trial(model: FullModel, learner: Learner, m: int, seed) -> TrialRecord:
    """Sample, fit, and measure one trial exactly.

    delta_bar is the population conditional TV of the fit (computable because
    the ground truth is finite and known); the type-1 loss is evaluated by
    exact cube summation on the true and estimated full models and asserted
    against the product-form bound.
    """
    if model.p_z_given_x is None:
        raise DomainError("run_trial needs a model with a z-channel")
    dataset = sample_dataset(model, m, seed)
    fitted = learner.fit(dataset[0], dataset[1], model.x_card, model.y_card)

    delta_bar = conditional_total_variation(model.p_x, model.p_y_given_x, fitted)
    zeta = training_zeta(dataset, fitted)
    info_true = model_info(model)
    info_est = model_info(model.with_conditional(fitted))
    i_loss_1 = abs(info_true.i_yz - info_est.i_yz)
    thm1_value = thm1_bound(delta_bar, info_true.i_xz)
    if i_loss_1 > thm1_value + 1e-9:
        raise CounterexampleFound(
            f"type-1 loss {i_loss_1!r} exceeds product-form bound {thm1_value!r} "
            f"(m={m}, seed={seed}, learner={learner.descriptor})"
        )
    hyp = _hypothesis_violation_rate(dataset, fitted, model.p_y_given_x)
    return TrialRecord(
        m=m, seed=int(seed), delta_bar=float(delta_bar), zeta=float(zeta),
        i_loss_1=float(i_loss_1), thm1_value=float(thm1_value),
        learner=learner.descriptor, hyp_violation_rate=float(hyp),
    )


def trial_seed(base_seed: int, m: int, index: int) -> int:
    """Splittable per-trial seed: independent stream per (base_seed, m, index)."""
    return int(np.random.SeedSequence((base_seed, m, index)).generate_state(1)[0])


def run_grid(model: FullModel, learner: Learner, m_grid, trials: int,
             base_seed: int) -> list[TrialRecord]:
    """All trials for every m in the grid, ordered by (m position, trial index)."""
    records = []
    for m in m_grid:
        for t in range(trials):
            records.append(run_trial(model, learner, int(m), trial_seed(base_seed, int(m), t)))
    return records


def wilson_upper(successes: int, n: int, z: float = WILSON_Z) -> float:
    """Upper end of the Wilson score interval for a binomial proportion."""
    if n < 1:
        raise DomainError("wilson_upper needs n >= 1")
    phat = successes / n
    denom = 1.0 + z * z / n
    center = phat + z * z / (2 * n)
    spread = z * math.sqrt(phat * (1.0 - phat) / n + z * z / (4 * n * n))
    return min(1.0, (center + spread) / denom)


def tail_estimates(records: list[TrialRecord], eps: float) -> list[TailEstimate]:
    """Per-m exceedance frequencies of delta_bar >= eps with Wilson upper bounds."""
    out = []
    for m in sorted({r.m for r in records}):
        sub = [r for r in records if r.m == m]
        hits = sum(1 for r in sub if r.delta_bar >= eps)
        out.append(TailEstimate(
            m=m, eps=eps, trials=len(sub), freq=hits / len(sub),
            wilson_hi=wilson_upper(hits, len(sub)),
        ))
    return out


def monte_carlo_tail(model: FullModel, learner: Learner, m_grid, eps: float,
                     trials: int, base_seed: int) -> list[TailEstimate]:
    """Tail frequencies P(delta_bar >= eps) across the m grid."""
    if trials < 100:
        raise DomainError(f"trials must be >= 100, got {trials!r}")
    records = run_grid(model, learner, m_grid, trials, base_seed)
    return tail_estimates(records, eps)


# ---------------------------------------------------------------------------
# stability probe
# ---------------------------------------------------------------------------

def stability_probe(learner: Learner, dataset, x_card: int, y_card: int,
                    perturb_mass: float, probe_seed: int = 0) -> float:
    """Refit after boosting one training point's empirical mass and return the
    conditional TV between the two fits, weighted by empirical x-frequency.

    A continuous learner sends this to zero with perturb_mass.
    """
    xs, ys = dataset
    m = len(xs)
    if not 0.0 <= perturb_mass <= 1.0 / m:
        raise DomainError(f"perturb_mass must lie in [0, 1/m], got {perturb_mass!r}")
    base_w = np.full(m, 1.0 / m)
    pert_w = base_w.copy()
    idx = int(np.random.default_rng(probe_seed).integers(m))
    pert_w[idx] += perturb_mass
    pert_w /= pert_w.sum()

    fit0 = learner.fit(xs, ys, x_card, y_card, weights=base_w)
    fit1 = learner.fit(xs, ys, x_card, y_card, weights=pert_w)
    freq = np.bincount(xs, minlength=x_card).astype(np.float64) / m
    return conditional_total_variation(FiniteDist(freq), fit0, fit1)


def stability_ladder(learner: Learner, dataset, x_card: int, y_card: int,
                     perturb_mass: float, steps: int, probe_seed: int = 0) -> list[float]:
    """Probe values down a halving ladder starting at perturb_mass."""
    out = []
    mass = perturb_mass
    for _ in range(steps):
        out.append(stability_probe(learner, dataset, x_card, y_card, mass, probe_seed))
        mass *= 0.5
    return out


# ---------------------------------------------------------------------------
# k(m') reconstruction from trial measurements
# ---------------------------------------------------------------------------

def reconstruct_k_observations(deltas, m0: int, y_card: int, nu: float = 0.5,
                               zeta: float = 0.0, m_prime_range=range(1, 11)):
    """Back out (m', k_obs) pairs from deviations measured at the smallest m.

    This is a reconstruction (the source protocol fits k in sample at the
    smallest training size without spelling the extraction out): take the
    upper nu-quantile q of the measured deviations, and for each m' choose
    the k that makes the m'-th term of the non-asymptotic tail expression
    cross level nu exactly at eps = q, dropping the sub-exponential +2 d'
    term. That gives k_obs = sqrt(m') * max(0, (q - eps0(m')) / 2) with
    eps0(m')^2 = (m' |Y| ln 2 - ln nu) / (2 m0) + 4 zeta. Only positive
    observations are informative.
    """
    deltas = np.asarray(deltas, dtype=np.float64)
    if deltas.size < 2:
        raise DomainError("need at least two deviation measurements")
    if not 0.0 < nu < 1.0:
        raise DomainError(f"nu must lie in (0,1), got {nu!r}")
    q = float(np.quantile(deltas, 1.0 - nu))
    obs = []
    for mp in m_prime_range:
        eps0 = math.sqrt((mp * y_card * LN2 - math.log(nu)) / (2.0 * m0) + 4.0 * zeta)
        k_obs = math.sqrt(mp) * max(0.0, 0.5 * (q - eps0))
        if k_obs > 0.0:
            obs.append((int(mp), k_obs))
    return obs


def fit_k_from_trials(records: list[TrialRecord], y_card: int, nu: float = 0.5,
                      zeta: float = 0.0, m_prime_range=range(1, 11)) -> KModel:
    """Fit the k(m') power law in sample at the smallest measured m.

    Falls back to a constant (r=0) model when only one informative
    observation exists, and to k = 0 when none do.
    """
    m0 = min(r.m for r in records)
    deltas = [r.delta_bar for r in records if r.m == m0]
    obs = reconstruct_k_observations(deltas, m0, y_card, nu=nu, zeta=zeta,
                                     m_prime_range=m_prime_range)
    if len(obs) >= 2:
        return fit_k_model(obs)
    if len(obs) == 1:
        return KModel(k_c=obs[0][1], r=0.0)
    return KModel(k_c=0.0, r=0.0)


# ---------------------------------------------------------------------------
# experiment config and persistence
# ---------------------------------------------------------------------------

_EXPERIMENT_KEYS = {"model", "learner", "m_grid", "eps", "trials", "base_seed"}


def load_experiment(path) -> dict:
    """Parse and validate the experiment config document."""
    with open(path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    unknown = set(doc) - _EXPERIMENT_KEYS
    if unknown:
        raise ConfigError(f"unknown experiment config key {sorted(unknown)[0]!r}")
    for key in _EXPERIMENT_KEYS:
        if key not in doc:
            raise ConfigError(f"experiment config is missing required key {key!r}")
    model = load_model(doc["model"])
    learner = build_learner(doc["learner"])
    m_grid = [int(v) for v in doc["m_grid"]]
    if not m_grid or any(m < 1 for m in m_grid):
        raise ConfigError("key 'm_grid' must be a nonempty list of positive ints")
    return {
        "model": model,
        "learner": learner,
        "m_grid": m_grid,
        "eps": float(doc["eps"]),
        "trials": int(doc["trials"]),
        "base_seed": int(doc["base_seed"]),
    }


TRIALS_CSV_HEADER = ["m", "seed", "delta_bar", "zeta", "i_loss_1", "thm1_value"]


def write_trials_csv(path, records: list[TrialRecord]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(",".join(TRIALS_CSV_HEADER) + "\n")
        for r in records:
            fh.write(f"{r.m},{r.seed},{r.delta_bar!r},{r.zeta!r},"
                     f"{r.i_loss_1!r},{r.thm1_value!r}\n")


def read_trials_csv(path) -> list[TrialRecord]:
    records = []
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        for row in reader:
            records.append(TrialRecord(
                m=int(row["m"]), seed=int(row["seed"]),
                delta_bar=float(row["delta_bar"]), zeta=float(row["zeta"]),
                i_loss_1=float(row["i_loss_1"]), thm1_value=float(row["thm1_value"]),
                learner="",
            ))
    return records


def write_tail_json(path, estimates: list[TailEstimate], meta: dict | None = None) -> None:
    doc = {
        "estimates": [
            {"m": e.m, "eps": e.eps, "trials": e.trials, "freq": e.freq,
             "wilson_hi": e.wilson_hi}
            for e in estimates
        ],
    }
    if meta:
        doc["meta"] = meta
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")
