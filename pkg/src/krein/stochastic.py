"""Monte Carlo checks of the Gamma(2) series representations.

``X = sum_n Y_n / mu_n`` with ``Y_n`` independent Gamma(2) (each the sum of two
unit exponentials).  Its Laplace transform is ``prod (1 - lam/mu_n)^{-2}``,
which for Dirichlet eigenvalues at ``a`` equals ``phi_lam(a)^{-2}``.

Sampling is chunked: chunk ``i`` draws from ``Philox(SeedSequence(seed).spawn(...)[i])``,
so a given ``(seed, n_samples, chunk)`` always yields the same stream, and
per-chunk moments are merged pairwise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import integrate

from .errors import DomainError
from .propagation import phi as phi_at
from .reports import Report
from .spectral import dirichlet_eigs, spectral_measure
from .strings import StieltjesString

__all__ = [
    "RandomFunctional",
    "Moments",
    "gamma2_chunks",
    "sample",
    "verify_mgf_identity",
    "verify_tilted_identity",
    "verify_occupation_identity",
]

CHUNK = 1 << 15
N_SE = 4.0


@dataclass(frozen=True)
class RandomFunctional:
    """``sum_n Y_n / (mu_n - shift)``; ``shift = 0`` gives ``X``, ``shift = lam < 0`` gives ``Z``."""

    eigenvalues: np.ndarray
    shift: float = 0.0

    def __post_init__(self):
        mu = np.asarray(self.eigenvalues, dtype=float).reshape(-1)
        if mu.size == 0 or np.any(mu <= 0):
            raise DomainError("eigenvalues must be non-empty and positive")
        if self.shift > 0:
            raise DomainError("shift must be non-positive")
        object.__setattr__(self, "eigenvalues", mu)

    @property
    def coefficients(self) -> np.ndarray:
        return 1.0 / (self.eigenvalues - self.shift)

    @property
    def mean(self) -> float:
        return 2.0 * float(self.coefficients.sum())

    def mgf(self, theta: float) -> float:
        """``E e^{theta V} = prod (1 - theta c_n)^{-2}`` for ``theta < 1 / max c``."""
        return float(np.prod(1.0 - theta * self.coefficients) ** -2)


@dataclass(frozen=True)
class Moments:
    n: int
    mean: float
    m2: float

    @property
    def var(self) -> float:
        return self.m2 / (self.n - 1) if self.n > 1 else math.nan

    @property
    def se(self) -> float:
        return math.sqrt(self.var / self.n)

    @classmethod
    def of(cls, x: np.ndarray) -> "Moments":
        mean = float(x.mean())
        return cls(int(x.size), mean, float(((x - mean) ** 2).sum()))

    def merge(self, other: "Moments") -> "Moments":
        n = self.n + other.n
        d = other.mean - self.mean
        return Moments(n, self.mean + d * other.n / n, self.m2 + other.m2 + d * d * self.n * other.n / n)


def gamma2_chunks(n_samples: int, width: int, seed: int, chunk: int = CHUNK):
    """Yield ``(rows, width)`` arrays of Gamma(2) variates, chunk by chunk."""
    n_chunks = max(1, -(-n_samples // chunk))
    children = np.random.SeedSequence(seed).spawn(n_chunks)
    left = n_samples
    for ss in children:
        rows = min(chunk, left)
        left -= rows
        u = np.random.Generator(np.random.Philox(ss)).random((rows, width, 2))
        yield -np.log1p(-u).sum(axis=-1)


def sample(fn: RandomFunctional, n_samples: int, seed: int, functionals=("exp", "phi_exp", "value"),
           theta: float = 0.0, phi: Callable | None = None, chunk: int = CHUNK) -> dict:
    """Mean, variance and standard error of ``g(V)`` for each requested ``g``.

    ``value`` is ``V``; ``exp`` is ``e^{theta V}``; ``phi`` is ``phi(V)``;
    ``phi_exp`` is ``phi(V) e^{theta V}``.
    """
    c = fn.coefficients
    acc = {}
    for Y in gamma2_chunks(n_samples, c.size, seed, chunk):
        V = Y @ c
        for g in functionals:
            if g == "value":
                vals = V
            elif g == "exp":
                vals = np.exp(theta * V)
            elif g == "phi":
                vals = np.asarray(phi(V), dtype=float)
            elif g == "phi_exp":
                vals = np.asarray(phi(V), dtype=float) * np.exp(theta * V)
            else:
                raise ValueError(f"unknown functional {g!r}")
            m = Moments.of(vals)
            acc[g] = acc[g].merge(m) if g in acc else m
    return acc


def _phi_at_boundary(s: StieltjesString, lam: float, a: float) -> float:
    return phi_at(s, lam, a).value


def verify_mgf_identity(s: StieltjesString, a: float, lam: float, n_samples: int = 200_000,
                        seed: int = 0) -> Report:
    """``phi_lam(a)^{-2} = E e^{lam X}`` within four standard errors."""
    if lam > 0:
        raise DomainError("lam must be non-positive")
    exact = _phi_at_boundary(s, lam, a) ** -2
    if lam == 0:
        return Report("mgf_identity", True, {"se_gap": N_SE}, {"exact": 1.0, "mc": 1.0, "se": 0.0})
    fn = RandomFunctional(dirichlet_eigs(s, a).eigenvalues)
    st = sample(fn, n_samples, seed, ("exp",), theta=lam)["exp"]
    diff = st.mean - exact
    details = {"exact": exact, "product": fn.mgf(lam), "mc": st.mean, "se": st.se,
               "z": diff / st.se if st.se > 0 else 0.0, "n_samples": n_samples, "seed": seed}
    margin = N_SE * st.se - abs(diff)
    return Report("mgf_identity", margin >= 0, {"se_gap": margin}, details)


def verify_tilted_identity(s: StieltjesString, a: float, lam: float, phi: Callable,
                           n_samples: int = 200_000, seed: int = 0) -> Report:
    """``E(phi(X) e^{lam X}) = phi_lam(a)^{-2} E phi(Z)`` with ``Z = sum Y_n / (mu_n - lam)``.

    Both sides are sampled from independent streams.
    """
    if not lam < 0:
        raise DomainError("lam must be negative")
    mu = dirichlet_eigs(s, a).eigenvalues
    seeds = np.random.SeedSequence(seed).generate_state(2)
    lhs = sample(RandomFunctional(mu), n_samples, int(seeds[0]), ("phi_exp",), theta=lam, phi=phi)["phi_exp"]
    rhs_z = sample(RandomFunctional(mu, lam), n_samples, int(seeds[1]), ("phi",), phi=phi)["phi"]
    scale = _phi_at_boundary(s, lam, a) ** -2
    rhs, rhs_se = scale * rhs_z.mean, scale * rhs_z.se
    se = math.hypot(lhs.se, rhs_se)
    diff = lhs.mean - rhs
    details = {"lhs": lhs.mean, "lhs_se": lhs.se, "rhs": rhs, "rhs_se": rhs_se,
               "z": diff / se if se > 0 else 0.0, "E_Z": 2.0 * float((1.0 / (mu - lam)).sum())}
    if getattr(phi, "alpha", None) == 1.0 and hasattr(phi, "slope_at_one"):
        # phi(x) = x only below 1; the closed form holds when X rarely leaves [0, 1]
        details["x_exp_closed_form"] = RandomFunctional(mu).mgf(lam) * details["E_Z"]
    margin = N_SE * se - abs(diff)
    return Report("tilted_identity", margin >= 0, {"se_gap": margin}, details)


def _legendre_nodes(x0: float, x1: float, q: int):
    t, w = np.polynomial.legendre.leggauss(q)
    return 0.5 * (x1 - x0) * t + 0.5 * (x1 + x0), 0.5 * (x1 - x0) * w


def verify_occupation_identity(s: StieltjesString, f: Callable, n_samples: int = 100_000, seed: int = 0,
                               boundary: float | None = None, nodes_per_piece: int = 16,
                               rtol: float = 0.05) -> Report:
    """``int_{-inf}^l E f(X(x)) dx = int_0^inf p(t) f(t) dt`` within ``rtol``.

    ``X(x)`` uses the Dirichlet eigenvalues at ``x``; left of the first atom it
    is 0, and ``f`` is expected to vanish near 0, so the ``x``-integral starts
    at the first atom.  The same Gamma(2) draws are reused at every node.
    """
    end = s.l if boundary is None else float(boundary)
    if math.isinf(end):
        raise DomainError("the occupation identity needs a finite l or a boundary")
    if float(np.abs(f(np.zeros(1)))[0]) != 0.0:
        raise DomainError("f must vanish at 0")
    sigma = spectral_measure(s, None if boundary is None else end)
    f_scalar = lambda t: float(np.asarray(f(np.array([t])))[0])
    rhs = 0.0
    for xi, w in zip(sigma.xi, sigma.weights):
        g = lambda t: f_scalar(t) * math.exp(-xi * t)
        top = 60.0 / xi
        rhs += w * integrate.quad(g, 0.0, top, limit=400, epsrel=1e-10)[0]
    pos = s.positions[s.positions < end]
    edges = np.append(pos, end)
    xs, ws, coefs = [], [], []
    width = pos.size
    for j in range(pos.size):
        nx, nw = _legendre_nodes(edges[j], edges[j + 1], nodes_per_piece)
        for x, w in zip(nx, nw):
            mu = dirichlet_eigs(s, x).eigenvalues
            c = np.zeros(width)
            c[: mu.size] = 1.0 / mu
            coefs.append(c)
            ws.append(w)
    C = np.array(coefs)  # nodes x width
    W = np.array(ws)
    acc = None
    for Y in gamma2_chunks(n_samples, width, seed):
        per_sample = f(Y @ C.T) @ W
        m = Moments.of(np.asarray(per_sample, dtype=float))
        acc = m if acc is None else acc.merge(m)
    lhs = acc.mean
    denom = max(abs(rhs), abs(lhs))
    rel = abs(lhs - rhs) / denom if denom > 0 else 0.0
    details = {"lhs": lhs, "lhs_se": acc.se, "rhs": rhs, "relative_gap": rel}
    return Report("occupation_identity", rel <= rtol, {"relative": rtol - rel}, details)
