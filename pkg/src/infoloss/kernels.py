"""Hot numeric kernels, compiled with numba when available.

Every kernel has two implementations with identical semantics:

* a scalar-loop version, compiled with ``@njit(cache=True)`` on the numba
  path (these loops are also plain valid Python);
* a vectorized pure-numpy version used when numba is disabled or absent.

Inputs are float64 arrays already validated by the callers; kernels do no
error handling of their own. Entropies and mutual informations are in bits,
KL and cross entropy in nats (log conversions happen here, in one place).
"""

import math

import numpy as np

from .backend import NUMBA_ENABLED, jit

_LN2 = math.log(2.0)


# ---------------------------------------------------------------------------
# loop implementations (numba-compilable)
# ---------------------------------------------------------------------------

def _entropy_bits_loop(p):
    acc = 0.0
    for i in range(p.shape[0]):
        v = p[i]
        if v > 0.0:
            acc -= v * math.log(v)
    return acc / _LN2


def _kl_nats_loop(p, q):
    acc = 0.0
    for i in range(p.shape[0]):
        v = p[i]
        if v > 0.0:
            acc += v * math.log(v / q[i])
    return acc


def _joint_mi_bits_loop(j):
    nx, ny = j.shape
    px = np.zeros(nx)
    py = np.zeros(ny)
    for a in range(nx):
        for b in range(ny):
            px[a] += j[a, b]
            py[b] += j[a, b]
    acc = 0.0
    for a in range(nx):
        for b in range(ny):
            v = j[a, b]
            if v > 0.0:
                acc += v * math.log(v / (px[a] * py[b]))
    return acc / _LN2


def _cond_tv_loop(px, p, q):
    acc = 0.0
    for a in range(p.shape[0]):
        row = 0.0
        for b in range(p.shape[1]):
            row += abs(p[a, b] - q[a, b])
        acc += px[a] * 0.5 * row
    return acc


def _cond_ce_nats_loop(px, truth, est):
    acc = 0.0
    for a in range(truth.shape[0]):
        if px[a] <= 0.0:
            continue
        row = 0.0
        for b in range(truth.shape[1]):
            v = truth[a, b]
            if v > 0.0:
                row -= v * math.log(est[a, b])
        acc += px[a] * row
    return acc


def _model_mis_loop(px, pyx, pzx):
    """Exact (X,Y,Z)-cube information quantities of a product-form model.

    Returns (i_xy, i_xz, i_yz, i_yz_given_x), all in bits. The conditional
    term is evaluated from the assembled cube rather than the factorization,
    so it acts as a rounding diagnostic (analytically zero).
    """
    nx = px.shape[0]
    ny = pyx.shape[1]
    nz = pzx.shape[1]

    py = np.zeros(ny)
    pz = np.zeros(nz)
    pyz = np.zeros((ny, nz))
    for a in range(nx):
        for b in range(ny):
            py[b] += px[a] * pyx[a, b]
        for c in range(nz):
            pz[c] += px[a] * pzx[a, c]
    for a in range(nx):
        for b in range(ny):
            w = px[a] * pyx[a, b]
            if w == 0.0:
                continue
            for c in range(nz):
                pyz[b, c] += w * pzx[a, c]

    i_xy = 0.0
    i_xz = 0.0
    for a in range(nx):
        if px[a] <= 0.0:
            continue
        for b in range(ny):
            v = px[a] * pyx[a, b]
            if v > 0.0:
                i_xy += v * math.log(v / (px[a] * py[b]))
        for c in range(nz):
            v = px[a] * pzx[a, c]
            if v > 0.0:
                i_xz += v * math.log(v / (px[a] * pz[c]))

    i_yz = 0.0
    for b in range(ny):
        for c in range(nz):
            v = pyz[b, c]
            if v > 0.0:
                i_yz += v * math.log(v / (py[b] * pz[c]))

    i_yz_x = 0.0
    for a in range(nx):
        if px[a] <= 0.0:
            continue
        qy = np.zeros(ny)
        qz = np.zeros(nz)
        cube = np.zeros((ny, nz))
        for b in range(ny):
            for c in range(nz):
                cube[b, c] = pyx[a, b] * pzx[a, c]
                qy[b] += cube[b, c]
                qz[c] += cube[b, c]
        acc = 0.0
        for b in range(ny):
            for c in range(nz):
                v = cube[b, c]
                if v > 0.0:
                    acc += v * math.log(v / (qy[b] * qz[c]))
        i_yz_x += px[a] * acc

    return i_xy / _LN2, i_xz / _LN2, i_yz / _LN2, i_yz_x / _LN2


# ---------------------------------------------------------------------------
# vectorized numpy implementations
# ---------------------------------------------------------------------------

def _entropy_bits_np(p):
    nz = p[p > 0.0]
    return float(-np.sum(nz * np.log2(nz)))


def _kl_nats_np(p, q):
    mask = p > 0.0
    return float(np.sum(p[mask] * np.log(p[mask] / q[mask])))


def _joint_mi_bits_np(j):
    px = j.sum(axis=1)
    py = j.sum(axis=0)
    prod = np.outer(px, py)
    mask = j > 0.0
    return float(np.sum(j[mask] * np.log2(j[mask] / prod[mask])))


def _cond_tv_np(px, p, q):
    return float(px @ (0.5 * np.abs(p - q).sum(axis=1)))


def _cond_ce_nats_np(px, truth, est):
    mask = (truth > 0.0) & (px > 0.0)[:, None]
    terms = np.zeros_like(truth)
    terms[mask] = truth[mask] * np.log(est[mask])
    return float(-(px @ terms.sum(axis=1)))


def _model_mis_np(px, pyx, pzx):
    pxy = px[:, None] * pyx
    pxz = px[:, None] * pzx
    py = pxy.sum(axis=0)
    pz = pxz.sum(axis=0)
    pyz = np.einsum("a,ab,ac->bc", px, pyx, pzx)

    i_xy = _mi_from_joint_nats(pxy, px, py)
    i_xz = _mi_from_joint_nats(pxz, px, pz)
    i_yz = _mi_from_joint_nats(pyz, py, pz)

    cube = pyx[:, :, None] * pzx[:, None, :]
    qy = cube.sum(axis=2)
    qz = cube.sum(axis=1)
    prod = qy[:, :, None] * qz[:, None, :]
    mask = cube > 0.0
    per_x = np.zeros(px.shape[0])
    contrib = np.zeros_like(cube)
    contrib[mask] = cube[mask] * np.log(cube[mask] / prod[mask])
    per_x = contrib.sum(axis=(1, 2))
    i_yz_x = float(px @ per_x)

    return i_xy / _LN2, i_xz / _LN2, i_yz / _LN2, i_yz_x / _LN2


def _mi_from_joint_nats(j, pa, pb):
    prod = np.outer(pa, pb)
    mask = j > 0.0
    return float(np.sum(j[mask] * np.log(j[mask] / prod[mask])))


# ---------------------------------------------------------------------------
# dispatch
# ---------------------------------------------------------------------------

NUMPY_IMPLS = {
    "entropy_bits": _entropy_bits_np,
    "kl_nats": _kl_nats_np,
    "joint_mi_bits": _joint_mi_bits_np,
    "cond_tv": _cond_tv_np,
    "cond_ce_nats": _cond_ce_nats_np,
    "model_mis": _model_mis_np,
}

if NUMBA_ENABLED:
    NUMBA_IMPLS = {
        "entropy_bits": jit(_entropy_bits_loop),
        "kl_nats": jit(_kl_nats_loop),
        "joint_mi_bits": jit(_joint_mi_bits_loop),
        "cond_tv": jit(_cond_tv_loop),
        "cond_ce_nats": jit(_cond_ce_nats_loop),
        "model_mis": jit(_model_mis_loop),
    }
    ACTIVE = NUMBA_IMPLS
else:
    NUMBA_IMPLS = None
    ACTIVE = NUMPY_IMPLS

entropy_bits = ACTIVE["entropy_bits"]
kl_nats = ACTIVE["kl_nats"]
joint_mi_bits = ACTIVE["joint_mi_bits"]
cond_tv = ACTIVE["cond_tv"]
cond_ce_nats = ACTIVE["cond_ce_nats"]
model_mis = ACTIVE["model_mis"]


def warmup():
    """Trigger JIT compilation outside any timed region (no-op on numpy path)."""
    px = np.array([0.5, 0.5])
    rows = np.array([[0.8, 0.2], [0.3, 0.7]])
    entropy_bits(px)
    kl_nats(px, rows[0])
    joint_mi_bits(rows * 0.5)
    cond_tv(px, rows, rows[::-1].copy())
    cond_ce_nats(px, rows, rows)
    model_mis(px, rows, rows)
