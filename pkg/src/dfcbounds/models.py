"""Observation distributions, target functions and distortion measures."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .infotheory import entropy

PMF_TOL = 1e-12

DISCRETE_KINDS = ("rademacher", "bernoulli", "finite")
CONTINUOUS_KINDS = ("gaussian", "uniform", "laplace")


class ModelError(ValueError):
    pass


@dataclass(frozen=True)
class Marginal:
    """Distribution of a single observation W_v.

    Parameters by kind: bernoulli ``p``; gaussian ``mean, variance``;
    uniform ``low, high``; laplace ``loc, scale``; finite ``values, pmf``.
    """

    kind: str
    params: tuple = ()

    def __post_init__(self):
        k, p = self.kind, self.params
        if k == "rademacher":
            if p:
                raise ModelError("rademacher takes no parameters")
        elif k == "bernoulli":
            if len(p) != 1 or not 0.0 <= p[0] <= 1.0:
                raise ModelError(f"bernoulli needs p in [0, 1], got {p}")
        elif k == "gaussian":
            if len(p) != 2 or not p[1] > 0:
                raise ModelError(f"gaussian needs (mean, variance > 0), got {p}")
        elif k == "uniform":
            if len(p) != 2 or not p[1] > p[0]:
                raise ModelError(f"uniform needs low < high, got {p}")
        elif k == "laplace":
            if len(p) != 2 or not p[1] > 0:
                raise ModelError(f"laplace needs (loc, scale > 0), got {p}")
        elif k == "finite":
            if len(p) != 2:
                raise ModelError("finite needs (values, pmf)")
            values = tuple(float(x) for x in p[0])
            pmf = tuple(float(x) for x in p[1])
            if len(values) != len(pmf) or not values:
                raise ModelError("finite values and pmf must have equal nonzero length")
            if len(set(values)) != len(values):
                raise ModelError("finite values must be distinct")
            if any(x < 0 for x in pmf) or abs(sum(pmf) - 1.0) > PMF_TOL:
                raise ModelError(f"finite pmf must be nonnegative and sum to 1, got sum {sum(pmf)!r}")
            object.__setattr__(self, "params", (values, pmf))
        else:
            raise ModelError(f"unknown observation kind {k!r}")

    # constructors
    @classmethod
    def rademacher(cls) -> "Marginal":
        return cls("rademacher")

    @classmethod
    def bernoulli(cls, p: float = 0.5) -> "Marginal":
        return cls("bernoulli", (float(p),))

    @classmethod
    def gaussian(cls, mean: float = 0.0, variance: float = 1.0) -> "Marginal":
        return cls("gaussian", (float(mean), float(variance)))

    @classmethod
    def uniform(cls, low: float = 0.0, high: float = 1.0) -> "Marginal":
        return cls("uniform", (float(low), float(high)))

    @classmethod
    def laplace(cls, loc: float = 0.0, scale: float = 1.0) -> "Marginal":
        return cls("laplace", (float(loc), float(scale)))

    @classmethod
    def finite(cls, values: Sequence[float], pmf: Sequence[float]) -> "Marginal":
        return cls("finite", (tuple(values), tuple(pmf)))

    @property
    def is_discrete(self) -> bool:
        return self.kind in DISCRETE_KINDS

    def support(self) -> tuple[np.ndarray, np.ndarray]:
        """Values and probabilities of a discrete marginal (zero-mass atoms dropped)."""
        if self.kind == "rademacher":
            values, pmf = np.array([-1.0, 1.0]), np.array([0.5, 0.5])
        elif self.kind == "bernoulli":
            p = self.params[0]
            values, pmf = np.array([0.0, 1.0]), np.array([1 - p, p])
        elif self.kind == "finite":
            values, pmf = np.array(self.params[0]), np.array(self.params[1])
        else:
            raise ModelError(f"{self.kind} marginal has no finite support")
        keep = pmf > 0
        return values[keep], pmf[keep]

    @property
    def mean(self) -> float:
        if self.is_discrete:
            v, p = self.support()
            return float(v @ p)
        if self.kind == "uniform":
            return 0.5 * (self.params[0] + self.params[1])
        return float(self.params[0])

    @property
    def variance(self) -> float:
        if self.is_discrete:
            v, p = self.support()
            m = v @ p
            return float(((v - m) ** 2) @ p)
        if self.kind == "gaussian":
            return self.params[1]
        if self.kind == "uniform":
            return (self.params[1] - self.params[0]) ** 2 / 12.0
        return 2.0 * self.params[1] ** 2

    @property
    def symmetric_unimodal(self) -> bool:
        """True for densities symmetric and unimodal about their mean."""
        return self.kind in CONTINUOUS_KINDS

    def entropy(self) -> float:
        """Shannon entropy in bits (discrete marginals only)."""
        if not self.is_discrete:
            raise ModelError(f"{self.kind} marginal has no Shannon entropy")
        return entropy(self.support()[1])

    def differential_entropy(self) -> float:
        """Differential entropy in bits (continuous marginals only)."""
        if self.kind == "gaussian":
            return 0.5 * math.log2(2 * math.pi * math.e * self.params[1])
        if self.kind == "uniform":
            return math.log2(self.params[1] - self.params[0])
        if self.kind == "laplace":
            return math.log2(2 * math.e * self.params[1])
        raise ModelError(f"{self.kind} marginal has no density")

    def pdf(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if self.kind == "gaussian":
            m, var = self.params
            return np.exp(-0.5 * (x - m) ** 2 / var) / math.sqrt(2 * math.pi * var)
        if self.kind == "uniform":
            lo, hi = self.params
            return np.where((x >= lo) & (x <= hi), 1.0 / (hi - lo), 0.0)
        if self.kind == "laplace":
            loc, b = self.params
            return np.exp(-np.abs(x - loc) / b) / (2 * b)
        raise ModelError(f"{self.kind} marginal has no density")

    def sample(self, rng: np.random.Generator, size) -> np.ndarray:
        if self.kind == "gaussian":
            return rng.normal(self.params[0], math.sqrt(self.params[1]), size)
        if self.kind == "uniform":
            return rng.uniform(self.params[0], self.params[1], size)
        if self.kind == "laplace":
            return rng.laplace(self.params[0], self.params[1], size)
        values, pmf = self.support()
        return values[rng.choice(values.size, size=size, p=pmf)]

    def to_spec(self) -> dict:
        names = {
            "bernoulli": ("p",),
            "gaussian": ("mean", "variance"),
            "uniform": ("low", "high"),
            "laplace": ("loc", "scale"),
        }
        if self.kind == "finite":
            return {"kind": "finite", "values": list(self.params[0]), "pmf": list(self.params[1])}
        spec = {"kind": self.kind}
        spec.update(zip(names.get(self.kind, ()), self.params))
        return spec

    @classmethod
    def from_spec(cls, spec: Mapping) -> "Marginal":
        kind = spec.get("kind")
        if kind == "rademacher":
            return cls.rademacher()
        if kind == "bernoulli":
            return cls.bernoulli(spec.get("p", 0.5))
        if kind == "gaussian":
            return cls.gaussian(spec.get("mean", 0.0), spec.get("variance", 1.0))
        if kind == "uniform":
            return cls.uniform(spec.get("low", 0.0), spec.get("high", 1.0))
        if kind == "laplace":
            return cls.laplace(spec.get("loc", 0.0), spec.get("scale", 1.0))
        if kind == "finite":
            return cls.finite(spec["values"], spec["pmf"])
        raise ModelError(f"unknown observation kind {kind!r}")


@dataclass(frozen=True)
class ObservationModel:
    """Independent observations, one marginal per node."""

    nodes: tuple[str, ...]
    marginals: tuple[Marginal, ...]

    def __post_init__(self):
        nodes = tuple(str(v) for v in self.nodes)
        if len(nodes) != len(self.marginals):
            raise ModelError("one marginal per node is required")
        if len(set(nodes)) != len(nodes):
            raise ModelError("duplicate node ids in observation model")
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "marginals", tuple(self.marginals))

    @classmethod
    def iid(cls, nodes: Sequence, marginal: Marginal) -> "ObservationModel":
        nodes = tuple(str(v) for v in nodes)
        return cls(nodes, (marginal,) * len(nodes))

    def marginal(self, v) -> Marginal:
        return self.marginals[self.index(v)]

    def index(self, v) -> int:
        try:
            return self.nodes.index(str(v))
        except ValueError:
            raise ModelError(f"unknown node {v!r}") from None

    @property
    def is_discrete(self) -> bool:
        return all(m.is_discrete for m in self.marginals)

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        """Array of shape (n, |V|) in node order."""
        return np.column_stack([m.sample(rng, n) for m in self.marginals])

    def to_spec(self) -> dict:
        if len(set(self.marginals)) == 1:
            return {"iid": self.marginals[0].to_spec()}
        return {"per_node": {v: m.to_spec() for v, m in zip(self.nodes, self.marginals)}}


FUNCTION_KINDS = ("linear", "linear_vector", "parity", "identity")


@dataclass(frozen=True)
class FunctionSpec:
    """Target Z = f(W). Coefficients and matrix columns follow node order."""

    kind: str
    coefficients: tuple[float, ...] | None = None
    matrix: np.ndarray | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.kind not in FUNCTION_KINDS:
            raise ModelError(f"unknown function kind {self.kind!r}")
        if self.kind == "linear":
            if not self.coefficients:
                raise ModelError("linear function needs coefficients")
            object.__setattr__(self, "coefficients", tuple(float(a) for a in self.coefficients))
        if self.kind == "linear_vector":
            a = np.atleast_2d(np.asarray(self.matrix, dtype=float))
            if a.size == 0:
                raise ModelError("linear_vector needs a nonempty matrix")
            a.setflags(write=False)
            object.__setattr__(self, "matrix", a)

    @classmethod
    def linear(cls, coefficients: Sequence[float]) -> "FunctionSpec":
        return cls("linear", tuple(coefficients))

    @classmethod
    def linear_vector(cls, matrix) -> "FunctionSpec":
        return cls("linear_vector", matrix=np.asarray(matrix, dtype=float))

    @classmethod
    def parity(cls) -> "FunctionSpec":
        return cls("parity")

    @classmethod
    def identity(cls) -> "FunctionSpec":
        return cls("identity")

    def check(self, model: ObservationModel) -> None:
        n = len(model.nodes)
        if self.kind == "linear" and len(self.coefficients) != n:
            raise ModelError(f"coefficient vector has length {len(self.coefficients)}, expected {n}")
        if self.kind == "linear_vector" and self.matrix.shape[1] != n:
            raise ModelError(f"matrix has {self.matrix.shape[1]} columns, expected {n}")
        if self.kind == "parity":
            for m in model.marginals:
                if not m.is_discrete or not set(m.support()[0]) <= {0.0, 1.0}:
                    raise ModelError("parity requires {0,1}-valued observations")

    def evaluate(self, w: np.ndarray) -> np.ndarray:
        """Apply f row-wise to samples of shape (n, |V|)."""
        w = np.asarray(w)
        if self.kind == "linear":
            return w @ np.asarray(self.coefficients)
        if self.kind == "linear_vector":
            return w @ self.matrix.T
        if self.kind == "parity":
            return np.mod(np.rint(w).astype(np.int64).sum(axis=1), 2)
        return w

    def to_spec(self) -> dict:
        if self.kind == "linear":
            return {"kind": "linear", "coefficients": list(self.coefficients)}
        if self.kind == "linear_vector":
            return {"kind": "linear_vector", "matrix": self.matrix.tolist()}
        return {"kind": self.kind}

    @classmethod
    def from_spec(cls, spec: Mapping, n_nodes: int | None = None) -> "FunctionSpec":
        kind = spec.get("kind")
        if kind == "linear":
            coefs = spec.get("coefficients")
            if coefs is None:
                if n_nodes is None:
                    raise ModelError("linear function needs coefficients")
                coefs = [1.0] * n_nodes
            return cls.linear(coefs)
        if kind == "sum":
            if n_nodes is None:
                raise ModelError("sum needs the node count")
            return cls.linear([1.0] * n_nodes)
        if kind == "linear_vector":
            return cls.linear_vector(spec["matrix"])
        if kind in ("parity", "identity"):
            return cls(kind)
        raise ModelError(f"unknown function kind {kind!r}")


DISTORTION_KINDS = ("hamming", "absolute", "quadratic", "euclidean")


@dataclass(frozen=True)
class Distortion:
    kind: str
    d_max: float | None = None

    def __post_init__(self):
        if self.kind not in DISTORTION_KINDS:
            raise ModelError(f"unknown distortion kind {self.kind!r}")
        if self.d_max is not None and self.d_max < 0:
            raise ModelError("d_max must be nonnegative")
        if self.kind == "hamming" and self.d_max not in (None, 1.0):
            raise ModelError("hamming distortion has d_max = 1")

    def __call__(self, z, zhat) -> np.ndarray:
        z = np.asarray(z, dtype=float)
        zhat = np.asarray(zhat, dtype=float)
        if self.kind == "hamming":
            diff = z != zhat
            return (diff.any(axis=-1) if diff.ndim > 1 else diff).astype(float)
        if self.kind == "absolute":
            return np.abs(z - zhat)
        if self.kind == "quadratic":
            return (z - zhat) ** 2
        return np.linalg.norm(np.atleast_2d(z - zhat), axis=-1)

    @property
    def max_value(self) -> float | None:
        return 1.0 if self.kind == "hamming" else self.d_max

    def radius(self, eps: float) -> float:
        """Radius r with {d <= eps} = {|z - zhat| <= r} for scalar metric kinds."""
        if eps < 0:
            raise ModelError("eps must be nonnegative")
        if self.kind == "quadratic":
            return math.sqrt(eps)
        if self.kind == "hamming":
            return math.inf if eps >= 1 else 0.0
        return float(eps)

    def to_spec(self) -> dict:
        spec = {"kind": self.kind}
        if self.d_max is not None:
            spec["d_max"] = self.d_max
        return spec

    @classmethod
    def from_spec(cls, spec) -> "Distortion":
        if isinstance(spec, str):
            return cls(spec)
        return cls(spec["kind"], spec.get("d_max"))
