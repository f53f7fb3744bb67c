"""Finite probability objects: validated vectors, row-stochastic matrices,
joints, and the three-variable product model behind every computation here.

Validation is loud: support and normalization problems raise semantic errors
instead of being epsilon-floored. Input normalization tolerance is 1e-12;
derived quantities are compared at 1e-10 elsewhere.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import ConfigError, NegativeMass, NotNormalized, ShapeMismatch

NORM_TOL = 1e-12
COND_MI_TOL = 1e-10


def _as_array(values, ndim):
    a = np.ascontiguousarray(values, dtype=np.float64)
    if a.ndim != ndim:
        raise ShapeMismatch(f"expected {ndim}-d array, got shape {a.shape}")
    return a


def _check_mass(a, tol=NORM_TOL):
    """Entrywise nonnegativity and total mass 1 within tol."""
    if np.any(a < 0.0):
        idx = np.unravel_index(int(np.argmin(a)), a.shape)
        loc = idx[0] if a.ndim == 1 else tuple(int(i) for i in idx)
        raise NegativeMass(loc, float(a[idx]))
    total = float(a.sum())
    if abs(total - 1.0) > tol:
        raise NotNormalized(total, tol)


def _freeze(a):
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class FiniteDist:
    """Probability vector over a finite alphabet."""

    probs: np.ndarray

    def __post_init__(self):
        a = _as_array(self.probs, 1)
        _check_mass(a)
        object.__setattr__(self, "probs", _freeze(a))

    def __len__(self):
        return self.probs.shape[0]

    @staticmethod
    def uniform(n: int) -> "FiniteDist":
        return FiniteDist(np.full(n, 1.0 / n))

    @staticmethod
    def point_mass(n: int, index: int) -> "FiniteDist":
        p = np.zeros(n)
        p[index] = 1.0
        return FiniteDist(p)


@dataclass(frozen=True)
class CondDist:
    """Row-stochastic matrix: one FiniteDist per conditioning value."""

    rows: np.ndarray

    def __post_init__(self):
        a = _as_array(self.rows, 2)
        for i in range(a.shape[0]):
            row = a[i]
            if np.any(row < 0.0):
                j = int(np.argmin(row))
                raise NegativeMass((i, j), float(row[j]))
            total = float(row.sum())
            if abs(total - 1.0) > NORM_TOL:
                raise NotNormalized(total, NORM_TOL)
        object.__setattr__(self, "rows", _freeze(a))

    @property
    def n_cond(self) -> int:
        return self.rows.shape[0]

    @property
    def n_target(self) -> int:
        return self.rows.shape[1]


@dataclass(frozen=True)
class JointXY:
    """Joint table over a finite product alphabet, with full x-support."""

    table: np.ndarray

    def __post_init__(self):
        a = _as_array(self.table, 2)
        _check_mass(a)
        px = a.sum(axis=1)
        if np.any(px <= 0.0):
            bad = int(np.argmin(px))
            raise NegativeMass(bad, float(px[bad]))
        object.__setattr__(self, "table", _freeze(a))

    def marginal_x(self) -> FiniteDist:
        return FiniteDist(self.table.sum(axis=1))

    def marginal_y(self) -> FiniteDist:
        return FiniteDist(self.table.sum(axis=0))

    def conditional_y_given_x(self) -> CondDist:
        px = self.table.sum(axis=1)
        return CondDist(self.table / px[:, None])


def joint_from(p_x: FiniteDist, p_y_given_x: CondDist) -> JointXY:
    if len(p_x) != p_y_given_x.n_cond:
        raise ShapeMismatch(
            f"p_x has {len(p_x)} symbols but conditional has {p_y_given_x.n_cond} rows"
        )
    return JointXY(p_x.probs[:, None] * p_y_given_x.rows)


@dataclass(frozen=True)
class FullModel:
    """Product model p(x)·p(y|x)·p(z|x); the two channels share the x-alphabet.

    The z-channel may be None for (X,Y)-only work; operations needing Z check.
    """

    p_x: FiniteDist
    p_y_given_x: CondDist
    p_z_given_x: CondDist | None = None

    def __post_init__(self):
        nx = len(self.p_x)
        if self.p_y_given_x.n_cond != nx:
            raise ShapeMismatch("p_y_given_x rows do not match the x-alphabet")
        if self.p_z_given_x is not None:
            if self.p_z_given_x.n_cond != nx:
                raise ShapeMismatch("p_z_given_x rows do not match the x-alphabet")
            # Markov property holds by construction; evaluated as a rounding check.
            _, _, _, i_yz_x = kernels.model_mis(
                self.p_x.probs, self.p_y_given_x.rows, self.p_z_given_x.rows
            )
            if abs(i_yz_x) > COND_MI_TOL:
                raise NotNormalized(1.0 + i_yz_x, COND_MI_TOL)

    @property
    def x_card(self) -> int:
        return len(self.p_x)

    @property
    def y_card(self) -> int:
        return self.p_y_given_x.n_target

    @property
    def z_card(self) -> int | None:
        return None if self.p_z_given_x is None else self.p_z_given_x.n_target

    def joint_xy(self) -> JointXY:
        return joint_from(self.p_x, self.p_y_given_x)

    def with_conditional(self, est: CondDist) -> "FullModel":
        """Same p(x) and z-channel, estimated label conditional."""
        return FullModel(self.p_x, est, self.p_z_given_x)


@dataclass(frozen=True)
class InfoReport:
    """Exact information quantities of a FullModel, in bits."""

    h_x: float
    h_y: float
    i_xy: float
    i_xz: float
    i_yz: float
    i_yz_given_x: float


# ---------------------------------------------------------------------------
# random instances (shared by property suites and the sampling lab)
# ---------------------------------------------------------------------------

def random_dist(rng: np.random.Generator, n: int, alpha: float = 1.0) -> FiniteDist:
    """Dirichlet(alpha) vector; small alpha gives spiky, near-deterministic mass."""
    p = rng.dirichlet(np.full(n, alpha))
    p = p / p.sum()
    return FiniteDist(p)


def random_cond(rng: np.random.Generator, n_cond: int, n_target: int,
                alpha: float = 1.0) -> CondDist:
    rows = rng.dirichlet(np.full(n_target, alpha), size=n_cond)
    rows = rows / rows.sum(axis=1, keepdims=True)
    return CondDist(rows)


def random_model(rng: np.random.Generator, x_card: int, y_card: int,
                 z_card: int | None = None, alpha: float = 1.0) -> FullModel:
    p_x = random_dist(rng, x_card, alpha)
    p_yx = random_cond(rng, x_card, y_card, alpha)
    p_zx = None if z_card is None else random_cond(rng, x_card, z_card, alpha)
    return FullModel(p_x, p_yx, p_zx)


# ---------------------------------------------------------------------------
# model file format
# ---------------------------------------------------------------------------

def model_from_dict(doc: dict) -> FullModel:
    """Parse the JSON model document (row-major lists)."""
    for key in ("x_card", "y_card", "p_x", "p_y_given_x"):
        if key not in doc:
            raise ConfigError(f"model document is missing required key {key!r}")
    nx = int(doc["x_card"])
    ny = int(doc["y_card"])
    p_x = FiniteDist(np.asarray(doc["p_x"], dtype=np.float64))
    if len(p_x) != nx:
        raise ConfigError(f"p_x has length {len(p_x)}, expected x_card={nx}")
    p_yx = CondDist(np.asarray(doc["p_y_given_x"], dtype=np.float64))
    if p_yx.rows.shape != (nx, ny):
        raise ConfigError(
            f"p_y_given_x has shape {p_yx.rows.shape}, expected ({nx}, {ny})"
        )
    p_zx = None
    if doc.get("p_z_given_x") is not None:
        p_zx = CondDist(np.asarray(doc["p_z_given_x"], dtype=np.float64))
        if p_zx.n_cond != nx:
            raise ConfigError(
                f"p_z_given_x has {p_zx.n_cond} rows, expected x_card={nx}"
            )
        if "z_card" in doc and int(doc["z_card"]) != p_zx.n_target:
            raise ConfigError(
                f"z_card={doc['z_card']} disagrees with p_z_given_x width {p_zx.n_target}"
            )
    return FullModel(p_x, p_yx, p_zx)


def model_to_dict(model: FullModel) -> dict:
    doc = {
        "x_card": model.x_card,
        "y_card": model.y_card,
        "p_x": model.p_x.probs.tolist(),
        "p_y_given_x": model.p_y_given_x.rows.tolist(),
    }
    if model.p_z_given_x is not None:
        doc["z_card"] = model.z_card
        doc["p_z_given_x"] = model.p_z_given_x.rows.tolist()
    return doc


def load_model(path) -> FullModel:
    with open(path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    return model_from_dict(doc)


def save_model(path, model: FullModel) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(model_to_dict(model), fh, indent=2, sort_keys=True)
        fh.write("\n")
