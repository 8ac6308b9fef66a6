"""Conditional small-ball probabilities and Lévy concentration estimates.

For independent observations and a linear target, the conditional small-ball
probability L(w_S, eps) does not depend on w_S and equals the Lévy
concentration function of the partial sum over S^c. ``expected_csbp``
dispatches between exact enumeration, closed forms, quadrature and Monte
Carlo according to the model.
"""
from __future__ import annotations

import itertools
import math
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np
from scipy.spatial import cKDTree
from scipy.special import erf, gammaln
from scipy.stats import laplace as _laplace
from scipy.stats import norm as _norm

from .estimates import Estimate, clopper_pearson, spawn_rng
from .infotheory import binary_divergence, binary_entropy  # re-exported
from .models import Distortion, FunctionSpec, Marginal, ModelError, ObservationModel

__all__ = [
    "binary_entropy", "binary_divergence",
    "levy_gaussian", "levy_logconcave_bound", "levy_erdos_LO", "levy_third_moment",
    "levy_vector_RV", "levy_discrete", "discrete_sum_pmf", "expected_csbp", "csbp_bruteforce",
    "MAX_EXACT_TERMS",
]

MAX_EXACT_TERMS = 24
DEFAULT_MC_SAMPLES = 1_000_000
_WINDOW_TOL = 1e-12


# -- closed-form estimates ---------------------------------------------------

def levy_gaussian(sigma2: float, eps: float) -> tuple[float, float]:
    """(P[|N(0, sigma2)| <= eps], sqrt(2/pi) eps / sigma)."""
    if sigma2 <= 0:
        raise ValueError("sigma2 must be positive")
    if eps < 0:
        raise ValueError("eps must be nonnegative")
    sigma = math.sqrt(sigma2)
    return float(erf(eps / (sigma * math.sqrt(2.0)))), math.sqrt(2.0 / math.pi) * eps / sigma


def levy_logconcave_bound(variance: float, rho: float) -> tuple[float, float]:
    """Two-sided bound on the concentration of a sum of independent log-concave variables."""
    if variance <= 0:
        raise ValueError("variance must be positive")
    if rho < 0:
        raise ValueError("rho must be nonnegative")
    scale = rho / math.sqrt(variance + rho * rho / 3.0)
    return min(scale / math.sqrt(3.0), 1.0), min(2.0 * scale, 1.0)


def levy_erdos_LO(k: int) -> float:
    """2^-k binom(k, floor(k/2)), computed in log space."""
    if k < 1:
        raise ValueError("k must be >= 1")
    m = k // 2
    log_c = gammaln(k + 1) - gammaln(m + 1) - gammaln(k - m + 1)
    return float(math.exp(log_c - k * math.log(2.0)))


def levy_third_moment(eps: float, K1: float, K2: float, B: float, c: float = 1.0,
                      setsize: int = 1) -> float:
    """c (eps/K1 + B (K2/K1)^3) / sqrt(setsize), clamped to [0, 1]."""
    if min(K1, K2, c) <= 0 or B < 0 or eps < 0:
        raise ValueError("need K1, K2, c > 0 and B, eps >= 0")
    if setsize < 1:
        raise ValueError("setsize must be >= 1")
    m = c * (eps / K1 + B * (K2 / K1) ** 3)
    return float(min(max(m / math.sqrt(setsize), 0.0), 1.0))


def levy_vector_RV(A_sub, per_coord_p: float, c: float = 1.0) -> dict:
    """Small-ball bound (c p)^{0.9 r} with r the stable rank of A_sub.

    Returns the bound with the norms and stable rank used.
    """
    a = np.atleast_2d(np.asarray(A_sub, dtype=float))
    hs2 = float((a * a).sum())
    if hs2 == 0.0:
        raise ValueError("A_sub must be nonzero")
    if not 0 < per_coord_p < 1:
        raise ValueError("per_coord_p must lie in (0, 1)")
    spec = float(np.linalg.norm(a, 2))
    r = max(1, int(math.floor(hs2 / (spec * spec) + 1e-12)))
    bound = min(max((c * per_coord_p) ** (0.9 * r), 0.0), 1.0)
    return {"bound": bound, "stable_rank": r, "hs_norm": math.sqrt(hs2), "spectral_norm": spec, "c": c}


# -- discrete sums -----------------------------------------------------------

def _merge_atoms(values: np.ndarray, pmf: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    order = np.argsort(values, kind="stable")
    values, pmf = values[order], pmf[order]
    scale = max(1.0, float(np.abs(values).max())) if values.size else 1.0
    new = np.concatenate(([True], np.diff(values) > 1e-12 * scale))
    idx = np.cumsum(new) - 1
    merged = np.zeros(idx[-1] + 1)
    np.add.at(merged, idx, pmf)
    return values[new], merged


def discrete_sum_pmf(terms: Sequence[tuple[float, Marginal]]) -> tuple[np.ndarray, np.ndarray]:
    """Distribution of sum_j a_j W_j for independent discrete W_j (merged atoms, sorted)."""
    values, pmf = np.array([0.0]), np.array([1.0])
    for a, m in terms:
        v, p = m.support()
        values = (values[:, None] + a * v[None, :]).ravel()
        pmf = (pmf[:, None] * p[None, :]).ravel()
        values, pmf = _merge_atoms(values, pmf)
    return values, pmf


def levy_discrete(values, pmf, radius: float) -> float:
    """sup_z P[|X - z| <= radius] for a finite distribution (closed window)."""
    values = np.asarray(values, dtype=float)
    pmf = np.asarray(pmf, dtype=float)
    if values.size == 0:
        return 0.0
    if math.isinf(radius):
        return float(pmf.sum())
    order = np.argsort(values)
    values, pmf = values[order], pmf[order]
    cum = np.concatenate(([0.0], np.cumsum(pmf)))
    scale = max(1.0, float(np.abs(values).max()))
    right = np.searchsorted(values, values + 2 * radius + _WINDOW_TOL * scale, side="right")
    return float(min((cum[right] - cum[np.arange(values.size)]).max(), 1.0))


# -- continuous sums ---------------------------------------------------------

def _scaled(a: float, m: Marginal) -> tuple[str, float]:
    """Kind and scale parameter of a W - a E[W] for symmetric continuous W."""
    if m.kind == "gaussian":
        return "gaussian", abs(a) * math.sqrt(m.params[1])
    if m.kind == "uniform":
        return "uniform", abs(a) * (m.params[1] - m.params[0]) / 2.0
    if m.kind == "laplace":
        return "laplace", abs(a) * m.params[1]
    raise ModelError(f"{m.kind} is not a continuous marginal")


def _centered_cdf(kind: str, scale: float, x: np.ndarray) -> np.ndarray:
    if kind == "gaussian":
        return _norm.cdf(x, scale=scale)
    if kind == "uniform":
        return np.clip((x + scale) / (2 * scale), 0.0, 1.0)
    return _laplace.cdf(x, scale=scale)


def _half_width(kind: str, scale: float) -> float:
    return {"gaussian": 12.0, "uniform": 1.0, "laplace": 40.0}[kind] * scale


def _levy_symmetric_quadrature(parts: list[tuple[str, float]], radius: float,
                               cells: int = 4001) -> float:
    """P[|X| <= radius] for X a sum of centred symmetric unimodal terms.

    Every term but the widest is discretized into equal cells at their
    midpoints; the widest term's CDF is integrated exactly against that
    lattice measure.
    """
    parts = sorted(parts, key=lambda t: _half_width(*t))
    last = parts.pop()
    if not parts:
        return float(_centered_cdf(*last, np.array([radius]))[0] - _centered_cdf(*last, np.array([-radius]))[0])
    h = min(_half_width(*p) for p in parts) * 2.0 / cells
    lattice = np.array([1.0])
    for kind, scale in parts:
        k = int(math.ceil(_half_width(kind, scale) / h))
        edges = (np.arange(-k, k + 2) - 0.5) * h
        mass = np.diff(_centered_cdf(kind, scale, edges))
        lattice = np.convolve(lattice, mass)
    k = (lattice.size - 1) // 2
    pos = np.arange(-k, k + 1) * h
    cdf_hi = _centered_cdf(*last, radius - pos)
    cdf_lo = _centered_cdf(*last, -radius - pos)
    return float(min(max((lattice * (cdf_hi - cdf_lo)).sum(), 0.0), 1.0))


# -- Monte Carlo -------------------------------------------------------------

def _levy_mc_1d(samples: np.ndarray, radius: float) -> tuple[int, int]:
    x = np.sort(samples)
    scale = max(1.0, float(np.abs(x).max()))
    right = np.searchsorted(x, x + 2 * radius + _WINDOW_TOL * scale, side="right")
    counts = right - np.arange(x.size)
    return int(counts.max()), x.size


def _levy_mc_ball(samples: np.ndarray, radius: float, centers: int = 20_000) -> tuple[int, int]:
    tree = cKDTree(samples)
    idx = np.linspace(0, samples.shape[0] - 1, min(centers, samples.shape[0])).astype(int)
    counts = tree.query_ball_point(samples[idx], radius * (1 + 1e-12), return_length=True)
    return int(np.max(counts)), samples.shape[0]


def _mc_estimate(k: int, n: int, method: str, notes=()) -> Estimate:
    return Estimate(k / n, method, clopper_pearson(k, n, 0.99), n, tuple(notes))


# -- dispatcher --------------------------------------------------------------

def _complement(model: ObservationModel, S: Iterable) -> list[int]:
    S = {str(v) for v in S}
    unknown = S - set(model.nodes)
    if unknown:
        raise ModelError(f"unknown nodes {sorted(unknown)}")
    return [i for i, v in enumerate(model.nodes) if v not in S]


def expected_csbp(model: ObservationModel, f: FunctionSpec, dist: Distortion, S: Iterable,
                  eps: float, samples: int = DEFAULT_MC_SAMPLES, seed: int = 0,
                  max_terms: int = MAX_EXACT_TERMS) -> Estimate:
    """E[L(W_S, eps)] for independent observations.

    Exact for discrete linear/parity/identity targets (up to ``max_terms``
    free terms), closed form for Gaussian sums, quadrature for sums of
    symmetric unimodal densities and Monte Carlo otherwise.
    """
    if eps < 0:
        raise ValueError("eps must be nonnegative")
    f.check(model)
    free = _complement(model, S)
    if f.kind == "linear":
        return _csbp_linear(model, f, dist, free, eps, samples, seed, max_terms)
    if f.kind == "parity":
        if dist.kind not in ("hamming", "absolute", "quadratic", "euclidean"):
            raise ModelError("unsupported distortion for parity")
        if dist.radius(eps) >= 1:
            return Estimate(1.0, "exact")
        q = 0.5 * (1.0 - math.prod(1.0 - 2.0 * _prob_one(model.marginals[i]) for i in free)) \
            if free else 0.0
        return Estimate(max(q, 1.0 - q), "exact")
    if f.kind == "identity":
        if dist.kind == "hamming":
            if eps >= 1:
                return Estimate(1.0, "exact")
            if any(not model.marginals[i].is_discrete for i in free):
                return Estimate(0.0, "exact", notes=("continuous coordinates have no atoms",))
            return Estimate(float(math.prod(model.marginals[i].support()[1].max() for i in free)), "exact")
        if dist.kind == "euclidean":
            if not free:
                return Estimate(1.0, "exact")
            rng = spawn_rng(seed, 0)
            x = np.column_stack([model.marginals[i].sample(rng, samples) for i in free])
            k, n = _levy_mc_ball(x, eps)
            return _mc_estimate(k, n, "monte_carlo_kdtree", ("lower estimate: ball centres restricted to samples",))
        raise ModelError(f"{dist.kind} distortion is not defined for a vector target")
    # linear_vector
    a = f.matrix[:, free]
    if not free or not np.any(a):
        return Estimate(1.0, "exact")
    if dist.kind == "hamming":
        if eps >= 1:
            return Estimate(1.0, "exact")
        if all(model.marginals[i].is_discrete for i in free) and len(free) <= max_terms:
            return Estimate(_max_vector_atom(model, a, free), "exact")
        return Estimate(0.0, "exact", notes=("continuous target has no atoms",))
    if dist.kind != "euclidean":
        raise ModelError(f"{dist.kind} distortion is not defined for a vector target")
    rng = spawn_rng(seed, 0)
    w = np.column_stack([model.marginals[i].sample(rng, samples) for i in free])
    k, n = _levy_mc_ball(w @ a.T, eps)
    return _mc_estimate(k, n, "monte_carlo_kdtree", ("lower estimate: ball centres restricted to samples",))


def _prob_one(m: Marginal) -> float:
    values, pmf = m.support()
    return float(pmf[values == 1.0].sum())


def _max_vector_atom(model, a, free) -> float:
    supports = [model.marginals[i].support() for i in free]
    atoms: dict[tuple, float] = {}
    for combo in itertools.product(*[range(len(s[0])) for s in supports]):
        w = np.array([supports[j][0][c] for j, c in enumerate(combo)])
        p = math.prod(supports[j][1][c] for j, c in enumerate(combo))
        key = tuple(np.round(a @ w, 12))
        atoms[key] = atoms.get(key, 0.0) + p
    return max(atoms.values())


def _csbp_linear(model, f, dist, free, eps, samples, seed, max_terms) -> Estimate:
    if dist.kind not in ("absolute", "quadratic", "hamming", "euclidean"):
        raise ModelError(f"unsupported distortion {dist.kind!r}")
    radius = dist.radius(eps)
    terms = [(f.coefficients[i], model.marginals[i]) for i in free if f.coefficients[i] != 0.0]
    if not terms or math.isinf(radius):
        return Estimate(1.0, "exact")
    if all(m.is_discrete for _, m in terms):
        if len(terms) <= max_terms:
            values, pmf = discrete_sum_pmf(terms)
            return Estimate(levy_discrete(values, pmf, radius), "exact")
    elif all(m.kind == "gaussian" for _, m in terms):
        var = sum(a * a * m.params[1] for a, m in terms)
        return Estimate(levy_gaussian(var, radius)[0], "closed_form")
    elif all(m.symmetric_unimodal for _, m in terms) and len(terms) <= 8:
        parts = [_scaled(a, m) for a, m in terms]
        gauss = [s for k, s in parts if k == "gaussian"]
        others = [(k, s) for k, s in parts if k != "gaussian"]
        if gauss:
            others.append(("gaussian", math.sqrt(sum(s * s for s in gauss))))
        return Estimate(_levy_symmetric_quadrature(others, radius), "quadrature",
                        notes=("sup attained at the centre of a symmetric unimodal sum",))
    rng = spawn_rng(seed, 0)
    x = np.zeros(samples)
    for a, m in terms:
        x += a * m.sample(rng, samples)
    k, n = _levy_mc_1d(x, radius)
    return _mc_estimate(k, n, "monte_carlo")


def csbp_bruteforce(joint: Mapping[tuple, float], f: Callable[[tuple], object], dist: Distortion,
                    S: Sequence[int], eps: float) -> float:
    """E[L(W_S, eps)] straight from the definition for a finite joint pmf.

    ``joint`` maps observation tuples to probabilities and ``S`` holds
    coordinate indices. Scalar targets use an exact sliding window; vector
    targets with hamming distortion use the largest atom.
    """
    groups: dict[tuple, dict] = {}
    for w, p in joint.items():
        if p <= 0:
            continue
        key = tuple(w[i] for i in S)
        z = f(w)
        cond = groups.setdefault(key, {})
        cond[z] = cond.get(z, 0.0) + p
    total = 0.0
    for cond in groups.values():
        mass = sum(cond.values())
        zs = list(cond)
        probs = np.array([cond[z] for z in zs]) / mass
        if dist.kind == "hamming":
            best = 1.0 if eps >= 1 else float(probs.max())
        elif np.ndim(zs[0]) == 0:
            best = levy_discrete(np.array(zs, dtype=float), probs, dist.radius(eps))
        else:
            pts = np.array(zs, dtype=float)
            best = max(float(probs[np.linalg.norm(pts - c, axis=1) <= eps + 1e-12].sum()) for c in pts)
        total += mass * best
    return total
