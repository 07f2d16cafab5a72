"""Trigonometric system in L_2([-pi, pi], |t|^lam dt) and its rotated pairing.

The system is ``x_1 = 1/sqrt(2 pi)``, ``x_2j = cos(jt)/sqrt(pi)``,
``x_2j+1 = sin(jt)/sqrt(pi)``.  Gram entries reduce, by product-to-sum
identities and parity, to the cosine moments

    mu_k = int_0^pi t^lam cos(k t) dt,

which are computed with 32-node Gauss-Legendre panels split dyadically
toward the origin (down to width pi 2^-40) and sub-split to resolve the
oscillation; the remaining sliver ``[0, pi 2^-40]`` is integrated from the
power series of the cosine.
"""
from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path

import numpy as np

from .core_spaces import SpaceHandle
from .finvec import FinVec

GL_NODES = 32
DYADIC_DEPTH = 40
DEFAULT_TOL = 1e-10
MAX_REFINE = 6


class QuadratureError(RuntimeError):
    """The requested tolerance was not reached within the panel budget."""


@lru_cache(maxsize=None)
def _gauss_legendre(n: int):
    return np.polynomial.legendre.leggauss(n)


def _panels(kmax: int, osc_factor: float):
    """Panel endpoints on [pi 2^-DEPTH, pi]: dyadic in scale, uniform in oscillation."""
    edges = [math.pi * 2.0**-i for i in range(DYADIC_DEPTH + 1)][::-1]
    pts = [edges[0]]
    for a, b in zip(edges, edges[1:]):
        pieces = max(1, math.ceil(max(kmax, 1) * (b - a) / osc_factor))
        pts.extend(np.linspace(a, b, pieces + 1)[1:].tolist())
    return np.array(pts)


def _moments_on_panels(lam: float, kmax: int, osc_factor: float) -> np.ndarray:
    x, w = _gauss_legendre(GL_NODES)
    pts = _panels(kmax, osc_factor)
    a, b = pts[:-1], pts[1:]
    half = 0.5 * (b - a)
    mid = 0.5 * (b + a)
    t = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    wt = (half[:, None] * w[None, :]).ravel() * t**lam
    k = np.arange(kmax + 1)
    body = np.cos(np.outer(k, t)) @ wt
    # sliver [0, d]: integrate the cosine series term by term
    d = math.pi * 2.0**-DYADIC_DEPTH
    sliver = np.zeros(kmax + 1)
    for r in range(4):
        sliver += (-1) ** r * (k * 1.0) ** (2 * r) * d ** (lam + 2 * r + 1) / (
            math.factorial(2 * r) * (lam + 2 * r + 1)
        )
    return body + sliver


@lru_cache(maxsize=64)
def cosine_moments(lam: float, kmax: int, tol: float = DEFAULT_TOL) -> np.ndarray:
    """``mu_k = int_0^pi t^lam cos(kt) dt`` for ``k = 0..kmax``, to absolute tolerance ``tol``."""
    if not -1 < lam < 1:
        raise ValueError(f"weight exponent must lie in (-1, 1), got {lam}")
    factor = 8.0
    prev = _moments_on_panels(lam, kmax, factor)
    for _ in range(MAX_REFINE):
        factor /= 2
        cur = _moments_on_panels(lam, kmax, factor)
        if np.max(np.abs(cur - prev)) < tol:
            cur.setflags(write=False)
            return cur
        prev = cur
    raise QuadratureError(f"moments for lambda={lam}, kmax={kmax} did not reach tol={tol}")


def _frequencies(n: int):
    """``(kind, freq)`` for basis positions 1..n: kind 0 const, 1 cos, 2 sin."""
    pos = np.arange(1, n + 1)
    kind = np.where(pos == 1, 0, np.where(pos % 2 == 0, 1, 2))
    freq = pos // 2
    return kind, freq


def _assemble(mu: np.ndarray, n: int) -> np.ndarray:
    kind, freq = _frequencies(n)
    ki, kj = kind[:, None], kind[None, :]
    fi, fj = freq[:, None], freq[None, :]
    diff = mu[np.abs(fi - fj)]
    summ = mu[fi + fj]
    G = np.zeros((n, n))
    # integrals over [-pi, pi] of even integrands are 2 int_0^pi
    cc = (ki == 1) & (kj == 1)
    ss = (ki == 2) & (kj == 2)
    G[cc] = ((diff + summ) / math.pi)[cc]
    G[ss] = ((diff - summ) / math.pi)[ss]
    c0 = (ki == 0) & (kj == 1)
    G[c0] = (math.sqrt(2) * mu[fj] / math.pi * np.ones_like(fi))[c0]
    c0t = (ki == 1) & (kj == 0)
    G[c0t] = (math.sqrt(2) * mu[fi] / math.pi * np.ones_like(fj))[c0t]
    G[0, 0] = mu[0] / math.pi
    return G


def _cache_name(lam: float, n: int, tol: float) -> str:
    return f"gram_lam{lam!r}_n{n}_tol{tol!r}_gl{GL_NODES}"


def save_gram(G: np.ndarray, directory, lam: float, tol: float) -> Path:
    """Write ``G`` as little-endian binary64 (row-major) plus a JSON sidecar."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    n = G.shape[0]
    stem = directory / _cache_name(lam, n, tol)
    tmp = stem.with_suffix(".bin.tmp")
    np.ascontiguousarray(G, dtype="<f8").tofile(tmp)
    os.replace(tmp, stem.with_suffix(".bin"))
    meta = {"lambda": lam, "N": n, "tol": tol, "nodes": GL_NODES, "dtype": "<f8", "order": "C"}
    stem.with_suffix(".json").write_text(json.dumps(meta, sort_keys=True))
    return stem.with_suffix(".bin")


def load_gram(directory, lam: float, n: int, tol: float) -> np.ndarray | None:
    stem = Path(directory) / _cache_name(lam, n, tol)
    bin_path, meta_path = stem.with_suffix(".bin"), stem.with_suffix(".json")
    if not (bin_path.exists() and meta_path.exists()):
        return None
    meta = json.loads(meta_path.read_text())
    if (meta.get("lambda"), meta.get("N"), meta.get("tol"), meta.get("nodes")) != (lam, n, tol, GL_NODES):
        return None
    return np.fromfile(bin_path, dtype="<f8").reshape(n, n)


@lru_cache(maxsize=32)
def _trig_gram_cached(lam: float, n: int, tol: float) -> np.ndarray:
    mu = cosine_moments(lam, 2 * (n // 2) + 1, tol)
    G = _assemble(mu, n)
    G = 0.5 * (G + G.T)
    np.linalg.cholesky(G)  # raises LinAlgError unless positive definite
    G.setflags(write=False)
    return G


def trig_gram(lam: float, n: int, tol: float = DEFAULT_TOL, cache_dir=None) -> np.ndarray:
    """Gram matrix of ``x_1..x_n`` in ``L_2([-pi, pi], |t|^lam dt)`` (read-only)."""
    lam, n, tol = float(lam), int(n), float(tol)
    if n < 1:
        raise ValueError("dimension must be positive")
    if cache_dir is not None:
        G = load_gram(cache_dir, lam, n, tol)
        if G is not None:
            G.setflags(write=False)
            return G
    G = _trig_gram_cached(lam, n, tol)
    if cache_dir is not None:
        save_gram(G, cache_dir, lam, tol)
    return G


def _dense(f: FinVec, n: int) -> np.ndarray:
    out = np.zeros(n)
    for i, v in f.items():
        if not isinstance(i, int) or i > n:
            from .core_spaces import SpaceDomainError

            raise SpaceDomainError(f"index {i!r} outside a space of dimension {n}")
        out[i - 1] = float(v)
    return out


def quadratic_norm(G: np.ndarray, c: np.ndarray) -> float:
    return float(math.sqrt(max(float(c @ G @ c), 0.0)))


@dataclass(frozen=True)
class WeightedTrig(SpaceHandle):
    """Span of ``x_1..x_dim`` in ``L_2(|t|^lam dt)``; vectors are coefficient sequences."""

    lam: float
    dim: int
    tol: float = DEFAULT_TOL
    unconditional = False
    hilbert = True

    def __post_init__(self):
        if not -1 < self.lam < 1:
            raise ValueError(f"lambda must lie in (-1, 1), got {self.lam}")
        if self.dim < 1:
            raise ValueError("dimension must be positive")

    def dimension(self):
        return self.dim

    def gram(self) -> np.ndarray:
        return trig_gram(self.lam, self.dim, self.tol)

    def norm(self, f):
        return quadratic_norm(self.gram(), _dense(f, self.dim))

    def __str__(self):
        return f"wtrig(lambda={self.lam:g},dim={self.dim})"


def rotation_matrix(dim: int) -> np.ndarray:
    """Map z-coefficients (length ``dim``) to stacked (u, v) component coefficients.

    ``z_{2n-1} = (x_n, y_n)/sqrt 2`` and ``z_{2n} = (x_n, -y_n)/sqrt 2``.
    """
    half = (dim + 1) // 2
    R = np.zeros((2 * half, dim))
    s = 1 / math.sqrt(2)
    for k in range(dim):
        n = k // 2
        R[n, k] = s
        R[half + n, k] = s if k % 2 == 0 else -s
    return R


def rotated_components(coeffs: FinVec, dim: int | None = None):
    """Split rotated coefficients into the ``x``- and ``y``-component coefficient vectors."""
    dim = coeffs.max_index() if dim is None else dim
    c = _dense(coeffs, dim)
    half = (dim + 1) // 2
    uv = rotation_matrix(dim) @ c
    return uv[:half], uv[half:]


@dataclass(frozen=True)
class RotatedTrigSum(SpaceHandle):
    """Rotated system in ``L_2(|t|^a) (+) L_2(|t|^-a)`` with the l_2-sum norm."""

    a: float
    dim: int
    tol: float = DEFAULT_TOL
    unconditional = False
    hilbert = True

    def __post_init__(self):
        if not 0 < self.a < 1:
            raise ValueError(f"rotation parameter must lie in (0, 1), got {self.a}")
        if self.dim < 1:
            raise ValueError("dimension must be positive")

    def dimension(self):
        return self.dim

    def component_grams(self):
        half = (self.dim + 1) // 2
        return trig_gram(self.a, half, self.tol), trig_gram(-self.a, half, self.tol)

    def gram(self) -> np.ndarray:
        Ga, Gb = self.component_grams()
        half = Ga.shape[0]
        B = np.zeros((2 * half, 2 * half))
        B[:half, :half] = Ga
        B[half:, half:] = Gb
        R = rotation_matrix(self.dim)
        return R.T @ B @ R

    def norm(self, f):
        Ga, Gb = self.component_grams()
        u, v = rotated_components(f, self.dim)
        return math.sqrt(max(float(u @ Ga @ u + v @ Gb @ v), 0.0))

    def __str__(self):
        return f"rot(a={self.a:g},dim={self.dim})"


def rotated_norm(a: float, coeffs: FinVec, dim: int | None = None, tol: float = DEFAULT_TOL) -> float:
    dim = max(coeffs.max_index(), 1) if dim is None else dim
    return RotatedTrigSum(a, dim, tol).norm(coeffs)


def indicator_norms(lam: float, ms, tol: float = DEFAULT_TOL) -> np.ndarray:
    """``|1_{A_m}|`` for ``A_m = [1, 2m+1]`` in ``L_2(|t|^lam)``."""
    ms = np.asarray(list(ms))
    G = trig_gram(lam, int(2 * ms.max() + 1), tol)
    # prefix sums of the Gram matrix give every leading block sum at once
    P = np.cumsum(np.cumsum(G, axis=0), axis=1)
    sizes = 2 * ms + 1
    return np.sqrt(P[sizes - 1, sizes - 1])


def loglog_slope(x, y) -> float:
    lx, ly = np.log(np.asarray(x, float)), np.log(np.asarray(y, float))
    return float(np.polyfit(lx, ly, 1)[0])


def dirichlet_growth(lam: float, mmax: int, mmin: int = 4, tol: float = DEFAULT_TOL):
    """Log-log slope of ``|1_{A_m}|`` against ``|A_m| = 2m + 1`` for ``mmin <= m <= mmax``.

    Returns ``(slope, ms, norms)``; the expected slope is ``(1 - lam)/2``.
    """
    ms = np.arange(mmin, mmax + 1)
    norms = indicator_norms(lam, ms, tol)
    return loglog_slope(2 * ms + 1, norms), ms, norms


def rotated_witness_ratios(a: float, ms, tol: float = DEFAULT_TOL) -> np.ndarray:
    """``|1_{eps, B_m}| / |1_{B_m}|`` for ``B_m = [1, 4m+2]``, ``eps_n = (-1)^n``."""
    ms = [int(m) for m in ms]
    space = RotatedTrigSum(a, 4 * max(ms) + 2, tol)
    out = []
    for m in ms:
        size = 4 * m + 2
        plain = FinVec.indicator(range(1, size + 1))
        signed = FinVec.indicator(range(1, size + 1), [(-1) ** n for n in range(1, size + 1)])
        out.append(space.norm(signed) / space.norm(plain))
    return np.array(out)


def dual_pairing(n: int, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Pairing ``int x_i x_j |t|^lam |t|^-lam dt``: the unweighted Gram, i.e. the identity."""
    return trig_gram(0.0, n, tol)
