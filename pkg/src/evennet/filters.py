"""Polynomial graph filters over powers of the propagation operator P.

A filter with coefficients ``w`` acts as ``sum_k w_k P^k`` ("full" parity)
or ``sum_k w_k P^{2k}`` ("even" parity). The scalar response at an
eigenvalue lambda of the normalized Laplacian is the same polynomial in
t = 1 - lambda, so even filters are symmetric about lambda = 1 and always
satisfy g(0) = g(2).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graph import Graph, propagate

FULL = "full"
EVEN = "even"


@dataclass
class PolyFilter:
    """Coefficients over powers of P. ``parity`` is "full" or "even"."""

    parity: str
    coefficients: np.ndarray

    def __post_init__(self):
        if self.parity not in (FULL, EVEN):
            raise ValueError(f"unknown parity {self.parity!r}")
        self.coefficients = np.asarray(self.coefficients, dtype=np.float64)
        if self.coefficients.ndim != 1 or len(self.coefficients) == 0:
            raise ValueError("coefficients must be a non-empty 1-d vector")

    @property
    def max_power(self) -> int:
        """Highest power of P the filter touches."""
        k = len(self.coefficients) - 1
        return 2 * k if self.parity == EVEN else k

    def to_json_dict(self) -> dict:
        return {"parity": self.parity, "coefficients": self.coefficients.tolist()}

    @classmethod
    def from_json_dict(cls, d: dict) -> "PolyFilter":
        return cls(parity=d["parity"], coefficients=np.array(d["coefficients"]))


def eval_function(f: PolyFilter, lam) -> np.ndarray | float:
    """Scalar filter response g(lambda), vectorized over lambda.

    Evaluated by Horner's rule in the shifted variable t = 1 - lambda
    (or t^2 for even parity) to avoid cancellation near lambda = 1.
    """
    t = 1.0 - np.asarray(lam, dtype=np.float64)
    base = t * t if f.parity == EVEN else t
    acc = np.zeros_like(base)
    for w in f.coefficients[::-1]:
        acc = acc * base + w
    return float(acc) if np.ndim(lam) == 0 else acc


def apply(f: PolyFilter, g: Graph, h: np.ndarray) -> np.ndarray:
    """Filter a node signal: sum_k w_k P^{sk} h with a running power of P.

    P^k is never materialized; each term costs one (even: two) sparse
    propagations, so the total work is O(K * d * |E|).
    """
    h = np.asarray(h, dtype=np.float64)
    if h.shape[0] != g.num_nodes:
        raise ValueError(f"signal has {h.shape[0]} rows, graph has {g.num_nodes} nodes")
    w = f.coefficients
    power = h
    out = w[0] * h
    for k in range(1, len(w)):
        power = propagate(g, power)
        if f.parity == EVEN:
            power = propagate(g, power)
        out = out + w[k] * power
    return out


def apply_dense_operator(f: PolyFilter, op: np.ndarray, h: np.ndarray) -> np.ndarray:
    """Same contract as :func:`apply` but for an explicit dense operator matrix."""
    op = np.asarray(op, dtype=np.float64)
    h = np.asarray(h, dtype=np.float64)
    w = f.coefficients
    power = h
    out = w[0] * h
    for k in range(1, len(w)):
        power = op @ power
        if f.parity == EVEN:
            power = op @ power
        out = out + w[k] * power
    return out


def ppr_init(alpha: float, order: int, parity: str = FULL) -> PolyFilter:
    """Personalized-PageRank coefficient profile.

    Full parity: w_k = alpha (1-alpha)^k for k < K and w_K = (1-alpha)^K,
    which sums to 1. Even parity samples the same geometric profile at
    even indices and renormalizes so the coefficients again sum to 1.
    """
    if not 0.0 < alpha <= 1.0:
        raise ValueError(f"alpha must be in (0, 1], got {alpha}")
    if order < 1:
        raise ValueError("order must be >= 1")
    if parity == FULL:
        w = np.array([alpha * (1 - alpha) ** k for k in range(order)] + [(1 - alpha) ** order])
    else:
        m = order // 2
        w = np.array([alpha * (1 - alpha) ** (2 * k) for k in range(m)] + [(1 - alpha) ** (2 * m)])
        w = w / w.sum()
    return PolyFilter(parity=parity, coefficients=w)


def even_odd_decompose(f: PolyFilter):
    """Split a full filter into its even part and the odd remainder.

    Returns ``(even_part, odd_response)`` where ``even_part`` keeps the
    coefficients at even powers of P and ``odd_response`` is the scalar
    function lambda -> g(lambda) - even_part(lambda). Pointwise,
    even_part(lambda) = (g(lambda) + g(2 - lambda)) / 2.
    """
    if f.parity != FULL:
        raise ValueError("decomposition expects a full-parity filter")
    even_part = PolyFilter(parity=EVEN, coefficients=f.coefficients[0::2].copy())

    def odd_response(lam):
        return eval_function(f, lam) - eval_function(even_part, lam)

    return even_part, odd_response
