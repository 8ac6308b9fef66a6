"""Finite discrete memoryless channels: capacity, SDPI constants, tensor products."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np
from scipy.optimize import minimize

from .infotheory import binary_entropy

STOCHASTIC_TOL = 1e-12
DEFAULT_TENSOR_CAP = 4096

EXACT = "exact"
CONSERVATIVE = "conservative"


class ChannelError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class Channel:
    """Row-stochastic transition matrix K[x, y] with a kind tag.

    ``kind`` is ``"bsc"``, ``"bec"`` or ``"matrix"``; ``param`` holds the
    crossover/erasure probability for the first two. BEC outputs are ordered
    (0, 1, erasure).
    """

    transition: np.ndarray
    kind: str = "matrix"
    param: float | None = None
    sdpi_hint: float | None = field(default=None, compare=False)

    def __post_init__(self):
        k = np.array(self.transition, dtype=float)
        if k.ndim != 2 or k.shape[0] < 1 or k.shape[1] < 1:
            raise ChannelError("transition must be a nonempty 2-D matrix")
        if np.any(k < 0) or np.any(k > 1):
            raise ChannelError("transition entries must lie in [0, 1]")
        sums = k.sum(axis=1)
        bad = np.flatnonzero(np.abs(sums - 1.0) > STOCHASTIC_TOL)
        if bad.size:
            raise ChannelError(f"row {int(bad[0])} sums to {sums[bad[0]]:.12g}, not 1")
        if self.sdpi_hint is not None and not 0.0 <= self.sdpi_hint <= 1.0:
            raise ChannelError("sdpi_hint must lie in [0, 1]")
        k.setflags(write=False)
        object.__setattr__(self, "transition", k)

    @property
    def input_alphabet_size(self) -> int:
        return self.transition.shape[0]

    @property
    def output_alphabet_size(self) -> int:
        return self.transition.shape[1]

    def to_spec(self) -> dict:
        if self.kind in ("bsc", "bec"):
            return {"kind": self.kind, "p": self.param}
        spec = {"kind": "matrix", "rows": self.transition.tolist()}
        if self.sdpi_hint is not None:
            spec["eta"] = self.sdpi_hint
        return spec

    def __repr__(self):
        if self.kind in ("bsc", "bec"):
            return f"{self.kind}({self.param:g})"
        return f"Channel({self.input_alphabet_size}x{self.output_alphabet_size})"

    def __eq__(self, other):
        return (
            isinstance(other, Channel)
            and self.kind == other.kind
            and self.transition.shape == other.transition.shape
            and np.array_equal(self.transition, other.transition)
        )

    def __hash__(self):
        return hash((self.kind, self.transition.shape, self.transition.tobytes()))


def bsc(p: float) -> Channel:
    if not 0.0 <= p <= 0.5:
        raise ChannelError(f"bsc crossover must lie in [0, 1/2], got {p}")
    return Channel(np.array([[1 - p, p], [p, 1 - p]]), kind="bsc", param=float(p))


def bec(p: float) -> Channel:
    if not 0.0 <= p <= 1.0:
        raise ChannelError(f"bec erasure probability must lie in [0, 1], got {p}")
    return Channel(np.array([[1 - p, 0.0, p], [0.0, 1 - p, p]]), kind="bec", param=float(p))


def make_channel(spec) -> Channel:
    """Build a channel from ``{"kind": "bsc"|"bec", "p": ...}`` or
    ``{"kind": "matrix", "rows": [[...], ...], "eta": optional}``."""
    if isinstance(spec, Channel):
        return spec
    if not isinstance(spec, Mapping):
        raise ChannelError(f"channel spec must be a mapping, got {type(spec).__name__}")
    kind = spec.get("kind")
    if kind == "bsc":
        return bsc(float(spec["p"]))
    if kind == "bec":
        return bec(float(spec["p"]))
    if kind == "matrix":
        eta = spec.get("eta")
        return Channel(np.array(spec["rows"], dtype=float), kind="matrix",
                       sdpi_hint=None if eta is None else float(eta))
    raise ChannelError(f"unknown channel kind {kind!r}")


def _blahut_arimoto_capacity(k: np.ndarray, tol: float = 1e-9, max_iter: int = 10_000) -> float:
    # Stops when the gap between max_x D(K_x || q) and I(r; K) drops below tol.
    m = k.shape[0]
    r = np.full(m, 1.0 / m)
    with np.errstate(divide="ignore", invalid="ignore"):
        log_k = np.where(k > 0, np.log2(np.where(k > 0, k, 1.0)), 0.0)
    lower = 0.0
    for _ in range(max_iter):
        q = r @ k
        log_q = np.log2(np.where(q > 0, q, 1.0))
        div = (k * (log_k - log_q)).sum(axis=1)
        lower = float(r @ div)
        upper = float(div.max())
        if upper - lower <= tol:
            break
        r = r * np.exp2(div)
        r /= r.sum()
    return max(lower, 0.0)


def capacity(ch: Channel) -> float:
    """Shannon capacity in bits per channel use."""
    if ch.kind == "bsc":
        return 1.0 - binary_entropy(ch.param)
    if ch.kind == "bec":
        return 1.0 - ch.param
    if ch.input_alphabet_size == 1:
        return 0.0
    return _blahut_arimoto_capacity(ch.transition)


def sdpi_constant(ch: Channel) -> tuple[float, str]:
    """Return (eta, flag). Exact for BSC/BEC, else a certified upper bound.

    A matrix channel reports its caller-supplied ``sdpi_hint`` when present
    (the caller vouches for it), otherwise the trivial bound 1.
    """
    if ch.kind == "bsc":
        return (1.0 - 2.0 * ch.param) ** 2, EXACT
    if ch.kind == "bec":
        return 1.0 - ch.param, EXACT
    k = ch.transition
    if np.allclose(k, k[0], atol=0.0, rtol=0.0):
        # output independent of input
        return 0.0, EXACT
    if ch.sdpi_hint is not None:
        return ch.sdpi_hint, CONSERVATIVE
    return 1.0, CONSERVATIVE


def sdpi_product_upper(eta: float, m: int) -> float:
    """Upper bound 1 - (1 - eta)^m on the SDPI constant of an m-fold product."""
    if not 0.0 <= eta <= 1.0:
        raise ValueError(f"eta must lie in [0, 1], got {eta}")
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    return 1.0 - (1.0 - eta) ** m


def tensor(chs: Sequence[Channel], cap: int = DEFAULT_TENSOR_CAP) -> Channel:
    """Tensor product of channels; input/output symbols in row-major order."""
    chs = list(chs)
    if not chs:
        raise ChannelError("tensor of an empty channel list")
    n_in = math.prod(c.input_alphabet_size for c in chs)
    n_out = math.prod(c.output_alphabet_size for c in chs)
    if max(n_in, n_out) > cap:
        raise ChannelError(
            f"product alphabet size {max(n_in, n_out)} exceeds cap {cap}; "
            "use sdpi_product_upper instead"
        )
    k = chs[0].transition
    for c in chs[1:]:
        k = np.kron(k, c.transition)
    if len(chs) == 1:
        return chs[0]
    return Channel(k, kind="matrix")


# -- diagnostics -------------------------------------------------------------

_LN2 = math.log(2.0)


def _phi(r):
    """(1 + r) ln(1 + r) - r, accurate for small |r|."""
    r = np.asarray(r, dtype=float)
    small = np.abs(r) < 0.1
    out = np.empty_like(r)
    with np.errstate(divide="ignore", invalid="ignore"):
        big = r[~small]
        out[~small] = np.where(big > -1, (1 + big) * np.log1p(np.maximum(big, -1 + 1e-300)) - big, 1.0)
    rs = r[small]
    series = np.zeros_like(rs)
    power = rs * rs
    for k in range(2, 20):
        series += (-1) ** k * power / (k * (k - 1))
        power = power * rs
    out[small] = series
    return out


def _stable_kl(diff, p):
    """Sum over the last axis of q ln(q/p) - q + p with q = p + diff, in bits.

    Taking the difference explicitly keeps full relative accuracy when q is
    close to p.
    """
    diff, p = np.broadcast_arrays(diff, p)
    with np.errstate(divide="ignore", invalid="ignore"):
        r = np.where(p > 0, diff / np.where(p > 0, p, 1.0), 0.0)
        terms = np.where(p > 0, p * _phi(r), np.where(diff > 0, np.inf, 0.0))
    return terms.sum(axis=-1) / _LN2


def _pair_ratio_grid(k1, k2, a, h):
    """D(Q_Y||P_Y) / D(Q_X||P_X) for P=(1-a, a), Q=(1-a-h, a+h) over a grid of (a, h)."""
    a = a[:, None]
    h = np.asarray(h, dtype=float)
    if h.ndim == 1:
        h = h[None, :]
    a, h = np.broadcast_arrays(a, h)
    px = np.stack([1 - a, a], axis=-1)
    dxs = np.stack([-h, h], axis=-1)
    dx = _stable_kl(dxs, px)
    py = (1 - a)[..., None] * k1 + a[..., None] * k2
    dy = _stable_kl(h[..., None] * (k2 - k1), py)
    valid = (a + h >= 0) & (a + h <= 1) & (dx > 0)
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(valid, dy / dx, -np.inf)


def sdpi_lower_estimate(ch: Channel, resolution: float = 1e-3, max_inputs: int = 8) -> float:
    """Diagnostic lower estimate of eta(K) by searching two-point input pairs.

    Every evaluated point is a genuine divergence ratio, so the result never
    exceeds the true constant (up to float rounding). Not used for bounds.
    """
    if ch.input_alphabet_size > max_inputs:
        raise ChannelError(
            f"input alphabet {ch.input_alphabet_size} too large for enumeration (max {max_inputs})"
        )
    if not 0 < resolution < 0.5:
        raise ValueError("resolution must lie in (0, 1/2)")
    k = ch.transition
    best = 0.0
    n_grid = int(round(1.0 / resolution))
    a_idx = np.arange(1, n_grid)
    chunk = max(1, 2_000_000 // ((n_grid + 1) * k.shape[1]))
    for x1, x2 in itertools.combinations(range(k.shape[0]), 2):
        k1, k2 = k[x1], k[x2]
        if np.array_equal(k1, k2):
            continue
        seeds = []
        for start in range(0, a_idx.size, chunk):
            ai = a_idx[start:start + chunk]
            # offsets chosen so that a + h runs over the grid {0, 1/n, ..., 1}
            h = (np.arange(0, n_grid + 1)[None, :] - ai[:, None]) / n_grid
            ratio = _pair_ratio_grid(k1, k2, ai / n_grid, h)
            i, j = np.unravel_index(np.argmax(ratio), ratio.shape)
            seeds.append((ratio[i, j], ai[i] / n_grid, h[i, j]))
        seeds.sort(reverse=True)
        best = max(best, seeds[0][0])

        def neg_ratio(z):
            a0 = float(np.clip(z[0], 1e-9, 1 - 1e-9))
            r = _pair_ratio_grid(k1, k2, np.array([a0]), np.array([z[1]]))[0, 0]
            return -r if np.isfinite(r) else 0.0

        for _, a0, h0 in seeds[:3]:
            res = minimize(neg_ratio, x0=[a0, h0], method="Nelder-Mead",
                           options={"xatol": resolution * 1e-3, "fatol": 1e-12, "maxiter": 400})
            best = max(best, -float(res.fun))
    return float(min(max(best, 0.0), 1.0))
