"""Bounds on the conditional mutual information between the target and a node's estimate.

Lower bounds come from small-ball probabilities and rate-distortion
functions; upper bounds from cutset capacities, SDPI contraction and the
chain recursion. All quantities are in bits.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.stats import binom

from .infotheory import binary_entropy, entropy

LN2 = math.log(2.0)


# -- lower bounds ------------------------------------------------------------

@dataclass(frozen=True)
class MiLower:
    """Lower bound on I(Z; Zhat_v | W_S). ``valid`` is False when the
    small-ball condition E[L] <= 1 - delta fails; negative values are vacuous."""

    value: float
    valid: bool
    method: str
    inputs: dict = field(default_factory=dict)

    @property
    def vacuous(self) -> bool:
        return self.value <= 0.0


def mi_lower_smallball(expected_L: float, delta: float) -> MiLower:
    """(1 - delta) log 1/E[L] - h2(delta)."""
    if not 0.0 <= expected_L <= 1.0 + 1e-12:
        raise ValueError(f"expected_L must lie in [0, 1], got {expected_L}")
    if not 0.0 <= delta < 1.0:
        raise ValueError(f"delta must lie in [0, 1), got {delta}")
    expected_L = min(expected_L, 1.0)
    inputs = {"expected_L": expected_L, "delta": delta}
    if expected_L == 0.0:
        return MiLower(math.inf, True, "small_ball", inputs)
    value = (1.0 - delta) * -math.log2(expected_L) - binary_entropy(delta)
    return MiLower(value, expected_L <= 1.0 - delta + 1e-15, "small_ball", inputs)


def mi_lower_rd(rate: float, mi_z_ws: float) -> float:
    """R_Z(eps) - I(Z; W_S)."""
    return rate - mi_z_ws


def mi_lower_gaussian_quadratic(h_cond: float, eps: float) -> float:
    """h(Z|W_S) + 1/2 log 1/(2 pi e eps) for quadratic distortion."""
    if eps <= 0:
        raise ValueError("eps must be positive")
    return h_cond + 0.5 * math.log2(1.0 / (2.0 * math.pi * math.e * eps))


def fano_continuum_lower(h_cond: float, E_Z2: float, eps: float, delta: float) -> float:
    """Continuum-Fano competitor: (1-delta) log 1/eps + h(Z|W_S) - 1/2 log(16 pi e E[Z^2])."""
    if eps <= 0 or E_Z2 <= 0:
        raise ValueError("eps and E_Z2 must be positive")
    return (1.0 - delta) * math.log2(1.0 / eps) + h_cond - 0.5 * math.log2(16 * math.pi * math.e * E_Z2)


# -- rate-distortion ---------------------------------------------------------

def _ba_rd_point(p: np.ndarray, d: np.ndarray, beta: float, mask=None,
                 tol: float = 1e-13, max_iter: int = 20_000) -> tuple[float, float]:
    """Blahut–Arimoto at slope -beta (natural units inside). Returns (rate bits, distortion)."""
    m = d.shape[1]
    log_q = np.full(m, -math.log(m))
    # a mask restricts reproductions to the listed pairs (the beta -> inf limit)
    penalty = beta * d if mask is None else np.where(mask, 0.0, np.inf)
    for _ in range(max_iter):
        logits = log_q[None, :] - penalty
        logits -= logits.max(axis=1, keepdims=True)
        cond = np.exp(logits)
        cond /= cond.sum(axis=1, keepdims=True)
        q = p @ cond
        with np.errstate(divide="ignore"):
            new_log_q = np.log(q)
        done = np.max(np.abs(np.exp(new_log_q) - np.exp(log_q))) < tol
        log_q = new_log_q
        if done:
            break
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(cond > 0, np.log(cond) - log_q[None, :], 0.0)
    rate = float((p[:, None] * cond * ratio).sum()) / LN2
    dist = float((p[:, None] * cond * d).sum())
    return max(rate, 0.0), dist


def rd_function_discrete(pmf, distortion, eps: float, tol: float = 1e-9) -> float:
    """Rate-distortion function R(eps) in bits for a finite source.

    ``distortion[z, zhat]`` may be rectangular. For eps below the smallest
    achievable distortion the entropy H(Z) is returned.
    """
    p = np.asarray(pmf, dtype=float).ravel()
    d = np.asarray(distortion, dtype=float)
    if d.ndim != 2 or d.shape[0] != p.size:
        raise ValueError("distortion must have one row per source symbol")
    if np.any(d < 0) or abs(p.sum() - 1.0) > 1e-12 or np.any(p < 0):
        raise ValueError("need a pmf and a nonnegative distortion matrix")
    keep = p > 0
    p, d = p[keep], d[keep]
    d_min = float(p @ d.min(axis=1))
    d_max = float((p @ d).min())
    if eps >= d_max:
        return 0.0
    if eps < d_min - 1e-12:
        return entropy(p)
    if eps <= d_min + 1e-12:
        return _ba_rd_point(p, d, 0.0, mask=d <= d.min(axis=1, keepdims=True) + 1e-12)[0]
    lo, hi = 0.0, 1.0
    while _ba_rd_point(p, d, hi)[1] > eps:
        lo, hi = hi, hi * 2.0
        if hi > 1e6:
            break
    rate = None
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        r, dist = _ba_rd_point(p, d, mid)
        if dist > eps:
            lo = mid
        else:
            hi, rate = mid, r
        if hi - lo < tol * max(1.0, hi):
            break
    if rate is None:
        rate = _ba_rd_point(p, d, hi)[0]
    return rate


# -- upper bounds ------------------------------------------------------------

def mi_upper_cutset(C_S: float, T: float) -> float:
    if C_S < 0 or T < 0:
        raise ValueError("C_S and T must be nonnegative")
    return C_S * T


def mi_upper_sdpi(H_cond: float, T: float, eta: float | None = None,
                  eta_star: float | None = None, in_degree: int | None = None) -> float:
    """(1 - (1 - eta_v)^T) H, or with eta_v replaced by 1 - (1 - eta*_v)^{|E_v|}."""
    if H_cond is None or not math.isfinite(H_cond):
        raise ValueError("SDPI bound needs a finite conditional entropy")
    if T < 0:
        raise ValueError("T must be nonnegative")
    if eta is None:
        if eta_star is None or in_degree is None:
            raise ValueError("pass eta or (eta_star, in_degree)")
        return (1.0 - (1.0 - eta_star) ** (in_degree * T)) * H_cond
    return (1.0 - (1.0 - eta) ** T) * H_cond


# -- chains ------------------------------------------------------------------

@dataclass(frozen=True)
class ChainParams:
    """Chain of n nodes; ``eta`` is a scalar or the list for nodes 2..n."""

    n: int
    T: int
    eta: float | tuple[float, ...]
    H: float | None = None
    C: float | None = None
    gamma: float | None = None

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("chain needs n >= 2")
        if self.T < 0:
            raise ValueError("T must be nonnegative")
        if self.H is None and self.C is None:
            raise ValueError("at least one of H and C is required")
        if isinstance(self.eta, (list, tuple, np.ndarray)):
            etas = tuple(float(e) for e in self.eta)
            if len(etas) != self.n - 1:
                raise ValueError(f"need {self.n - 1} per-node etas, got {len(etas)}")
            object.__setattr__(self, "eta", etas)
            vals = etas
        else:
            object.__setattr__(self, "eta", float(self.eta))
            vals = (self.eta,)
        if any(not 0.0 <= e <= 1.0 for e in vals):
            raise ValueError("eta values must lie in [0, 1]")

    @property
    def etas(self) -> tuple[float, ...]:
        if isinstance(self.eta, tuple):
            return self.eta
        return (self.eta,) * (self.n - 1)

    @property
    def eta_max(self) -> float:
        return max(self.etas)

    def replace(self, **kw) -> "ChainParams":
        base = dict(n=self.n, T=self.T, eta=self.eta, H=self.H, C=self.C, gamma=self.gamma)
        base.update(kw)
        return ChainParams(**base)


@dataclass(frozen=True)
class ChainValue:
    """Upper bound with the form that attained it (``"H"``, ``"C"`` or ``"zero"``)."""

    value: float
    binding: str
    forms: dict = field(default_factory=dict)

    def __float__(self):
        return float(self.value)


def _pick(forms: dict) -> ChainValue:
    if not forms:
        raise ValueError("no applicable form")
    key = min(forms, key=lambda k: forms[k])
    return ChainValue(forms[key], key, dict(forms))


def chain_mi_recursion_dp(params: ChainParams) -> ChainValue:
    """Solve the per-node recursion at equality.

    I_{2,t} = min(eta2bar I_{2,t-1} + eta2 H, C t), and for j >= 3
    I_{j,t} = etajbar I_{j,t-1} + etaj I_{j-1,t-1}, with I_{j,0} = 0.
    """
    n, T, etas = params.n, params.T, params.etas
    if T <= n - 2:
        return ChainValue(0.0, "zero", {})
    prev = np.zeros(n + 1)  # prev[j] = I_{j, t-1}
    for t in range(1, T + 1):
        cur = np.zeros(n + 1)
        e2 = etas[0]
        cands = []
        if params.H is not None:
            cands.append((1 - e2) * prev[2] + e2 * params.H)
        if params.C is not None:
            cands.append(params.C * t)
        cur[2] = min(cands)
        for j in range(3, n + 1):
            ej = etas[j - 2]
            cur[j] = (1 - ej) * prev[j] + ej * prev[j - 1]
        prev = cur
    forms = {}
    if params.H is not None and params.C is None:
        return ChainValue(float(prev[n]), "H", {"H": float(prev[n])})
    if params.C is not None and params.H is None:
        return ChainValue(float(prev[n]), "C", {"C": float(prev[n])})
    forms["min"] = float(prev[n])
    return ChainValue(float(prev[n]), "min", forms)


def chain_closed_H(n: int, T: int, eta: float, H: float) -> float:
    if T <= n - 2:
        return 0.0
    i = np.arange(1, T - n + 3)
    return float(H * eta * binom.pmf(n - 2, T - i, eta).sum())


def chain_closed_C(n: int, T: int, eta: float, C: float) -> float:
    if T <= n - 2:
        return 0.0
    if n == 2:
        return float(C * T)
    i = np.arange(1, T - n + 3)
    return float(C * eta * (binom.pmf(n - 3, T - i - 1, eta) * i).sum())


def chain_mi_closed(params: ChainParams) -> ChainValue:
    """Binomial-sum bounds with eta~ = max eta; minimum of the available forms."""
    if params.T <= params.n - 2:
        return ChainValue(0.0, "zero", {})
    eta = params.eta_max
    forms = {}
    if params.H is not None:
        forms["H"] = chain_closed_H(params.n, params.T, eta, params.H)
    if params.C is not None:
        forms["C"] = chain_closed_C(params.n, params.T, eta, params.C)
    return _pick(forms)


def etas_from_degrees(eta: float, degrees: Sequence[int]) -> tuple[float, ...]:
    """Per-node 1 - (1 - eta)^{d_i}."""
    return tuple(1.0 - (1.0 - eta) ** d for d in degrees)


def chain_mi_weakened(params: ChainParams) -> ChainValue:
    """Product-form bounds H prod_{i>=2} (1-(1-eta_i)^{T-n+2}) and
    C (T-n+2) prod_{i>=3} (...)."""
    n, T = params.n, params.T
    if T <= n - 2:
        return ChainValue(0.0, "zero", {})
    m = T - n + 2
    factors = [1.0 - (1.0 - e) ** m for e in params.etas]
    forms = {}
    if params.H is not None:
        forms["H"] = params.H * math.prod(factors)
    if params.C is not None:
        forms["C"] = params.C * m * math.prod(factors[1:])
    return _pick(forms)


def chain_mi_chernoff(n: int, T: int, eta: float, gamma: float, C: float) -> float | None:
    """C (n-3)^2 gamma^2 / eta exp(-2 (eta/gamma - eta)^2 (n-3)); None when inapplicable."""
    if n < 4 or not 0.0 < gamma < 1.0 or not 0.0 < eta <= 1.0:
        return None
    if T > 2 + (n - 3) * gamma / eta:
        return None
    if T <= n - 2:
        return 0.0
    return C * (n - 3) ** 2 * gamma ** 2 / eta * math.exp(-2.0 * (eta / gamma - eta) ** 2 * (n - 3))
