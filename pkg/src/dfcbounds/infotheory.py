"""Entropy, divergence and mutual information in bits.

All functions use the convention 0 log 0 = 0 and base-2 logarithms.
"""
from __future__ import annotations

import math

import numpy as np


def binary_entropy(p: float) -> float:
    """h2(p) in bits; h2(0) = h2(1) = 0."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"probability out of range: {p}")
    if p == 0.0 or p == 1.0:
        return 0.0
    return -p * math.log2(p) - (1.0 - p) * math.log2(1.0 - p)


def binary_divergence(p: float, q: float) -> float:
    """d2(p || q) in bits. Returns +inf when q is on the boundary and p is not."""
    if not (0.0 <= p <= 1.0 and 0.0 <= q <= 1.0):
        raise ValueError(f"probabilities out of range: p={p}, q={q}")
    total = 0.0
    for a, b in ((p, q), (1.0 - p, 1.0 - q)):
        if a == 0.0:
            continue
        if b == 0.0:
            return math.inf
        total += a * math.log2(a / b)
    return max(total, 0.0)


def entropy(pmf) -> float:
    p = np.asarray(pmf, dtype=float).ravel()
    p = p[p > 0]
    return float(-(p * np.log2(p)).sum())


def kl_divergence(p, q) -> float:
    """D(p || q) in bits, +inf if p is not absolutely continuous w.r.t. q."""
    p = np.asarray(p, dtype=float).ravel()
    q = np.asarray(q, dtype=float).ravel()
    support = p > 0
    if np.any(q[support] <= 0):
        return math.inf
    return float(max((p[support] * np.log2(p[support] / q[support])).sum(), 0.0))


def mutual_information(joint) -> float:
    """I(X;Y) for a 2-D joint pmf array indexed [x, y]."""
    joint = np.asarray(joint, dtype=float)
    px = joint.sum(axis=1, keepdims=True)
    py = joint.sum(axis=0, keepdims=True)
    mask = joint > 0
    ratio = joint[mask] / (px @ py)[mask]
    return float(max((joint[mask] * np.log2(ratio)).sum(), 0.0))


def conditional_mutual_information(joint) -> float:
    """I(X;Y|Z) for a 3-D joint pmf array indexed [x, y, z]."""
    joint = np.asarray(joint, dtype=float)
    total = 0.0
    for k in range(joint.shape[2]):
        pz = joint[:, :, k].sum()
        if pz > 0:
            total += pz * mutual_information(joint[:, :, k] / pz)
    return total
