"""Class-level interaction structure and homophily instruments.

The k-step interaction matrix aggregates P^k between classes; the
k-homophily degree condenses it to a scalar measuring how well k-hop
structure predicts class membership. Filter-transformed homophily is
computed along two independent routes (a matrix polynomial and a
binomially re-expanded power series) and the closed-form moment
calculations live here as well, together with the random-walk recurrence
they rest on.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb

import numpy as np

from .filters import EVEN, PolyFilter
from .graph import Graph, LabelAssignment, edge_homophily, propagate


@dataclass
class InteractionMatrix:
    """K x K class-interaction aggregate of P^k (symmetric)."""

    order: int
    values: np.ndarray


def interaction_probability(g: Graph, labels: LabelAssignment, k: int) -> InteractionMatrix:
    """R^{-1/2} Y^T P^k Y R^{-1/2} via k sparse propagations of the indicator.

    P^k is never materialized; the N x K indicator is propagated k times.
    """
    if k < 0:
        raise ValueError("hop count must be >= 0")
    if labels.num_nodes != g.num_nodes:
        raise ValueError("labels must cover all nodes")
    if (labels.class_sizes == 0).any():
        empty = int(np.argmax(labels.class_sizes == 0))
        raise ValueError(f"class {empty} is empty; size normalization is undefined")
    y = labels.indicator_matrix()
    t = y
    for _ in range(k):
        t = propagate(g, t)
    rinv = 1.0 / np.sqrt(labels.class_sizes.astype(np.float64))
    return InteractionMatrix(order=k, values=rinv[:, None] * (y.T @ t) * rinv[None, :])


def k_homophily_degree(pi: InteractionMatrix, class_sizes: np.ndarray,
                       num_nodes: int) -> float:
    """Scalar degree (1/N) sum_l (R_l M_ll - sum_{m != l} sqrt(R_m R_l) M_lm)."""
    m = np.asarray(pi.values, dtype=np.float64)
    r = np.asarray(class_sizes, dtype=np.float64)
    if m.shape != (len(r), len(r)):
        raise ValueError("interaction matrix and class sizes disagree on K")
    sq = np.sqrt(r)
    weights = np.outer(sq, sq)
    diag = float(np.sum(r * np.diag(m)))
    off = float(np.sum(weights * m) - np.sum(np.diag(weights) * np.diag(m)))
    return (diag - off) / num_nodes


def _interaction_functional(m: np.ndarray, class_sizes: np.ndarray, num_nodes: int) -> float:
    return k_homophily_degree(InteractionMatrix(order=0, values=m), class_sizes, num_nodes)


def coefficient_reexpansion(w) -> np.ndarray:
    """Rewrite sum_i w_i (1-x)^i as sum_i theta_i x^i.

    theta_i = (-1)^i sum_{j >= i} w_j C(j, i). The map is an involution:
    re-expanding theta in powers of (1-x) recovers w.
    """
    w = np.asarray(w, dtype=np.float64)
    n = len(w)
    theta = np.zeros(n, dtype=np.float64)
    for i in range(n):
        acc = 0.0
        for j in range(i, n):
            acc += w[j] * comb(j, i)
        theta[i] = acc if i % 2 == 0 else -acc
    return theta


def transformed_homophily_paths(g: Graph, labels: LabelAssignment, f: PolyFilter,
                                reexpand=coefficient_reexpansion) -> tuple[float, float]:
    """Filter-transformed 1-homophily along two independent routes.

    Route A evaluates the filter polynomial at the class-level operator by
    Horner's rule (in B = the 1-step interaction matrix, matching the
    filter's P-power coefficients) and applies the homophily functional
    once. Route B re-expands the coefficients into powers of (I - B) and
    sums the functional of each explicit power. The two must agree; a bug
    in the binomial re-expansion breaks route B only.
    """
    if f.parity == EVEN:
        # Even filters are a full filter with the odd P-powers zeroed.
        w = np.zeros(2 * len(f.coefficients) - 1)
        w[0::2] = f.coefficients
    else:
        w = f.coefficients
    b = interaction_probability(g, labels, 1).values
    k = b.shape[0]
    eye = np.eye(k)

    acc = np.zeros_like(b)
    for coeff in w[::-1]:
        acc = acc @ b + coeff * eye
    path_a = _interaction_functional(acc, labels.class_sizes, g.num_nodes)

    theta = np.asarray(reexpand(w), dtype=np.float64)
    m = eye - b
    power = eye
    path_b = theta[0] * _interaction_functional(eye, labels.class_sizes, g.num_nodes)
    for i in range(1, len(theta)):
        power = power @ m
        path_b += theta[i] * _interaction_functional(power, labels.class_sizes, g.num_nodes)
    return path_a, float(path_b)


def transformed_homophily(g: Graph, labels: LabelAssignment, f: PolyFilter) -> float:
    return transformed_homophily_paths(g, labels, f)[0]


def transformed_homophily_moments(theta) -> tuple[float, float]:
    """Mean and variance of sum_i theta_i t^i for t uniform on (-1, 1).

    This is the idealized binary equal-class model in which the k-hop
    homophily degree equals t^k with t = 2h - 1. Moments are closed form:
    E[t^j] = 1/(j+1) for even j and 0 for odd j.
    """
    theta = np.asarray(theta, dtype=np.float64)
    n = len(theta)
    mean = sum(theta[j] / (j + 1) for j in range(0, n, 2))
    second = 0.0
    for i in range(n):
        for j in range(n):
            if (i + j) % 2 == 0:
                second += theta[i] * theta[j] / (i + j + 1)
    return float(mean), float(second - mean * mean)


def even_truncated(theta) -> np.ndarray:
    """Zero the odd-index coefficients (the even-order filter of the model)."""
    theta = np.asarray(theta, dtype=np.float64).copy()
    theta[1::2] = 0.0
    return theta


def odd_part_second_moment(theta) -> float:
    """E[(sum_{odd i} theta_i t^i)^2] under t ~ Uniform(-1, 1)."""
    theta = np.asarray(theta, dtype=np.float64)
    acc = 0.0
    for i in range(1, len(theta), 2):
        for j in range(1, len(theta), 2):
            acc += theta[i] * theta[j] / (i + j + 1)
    return float(acc)


def random_walk_expectation(k: int) -> float:
    """Expected same-class probability of a k-step walk under uniform homophily.

    Recurrence: e_1 = 1/2, e_2 = 2/3, e_k = (e_{k-2} + 1) / 3. Each
    two-step block integrates over its own homophily draw, so e_k = 1/2
    exactly for odd k and e_k >= 1/2 for even k.
    """
    if k < 1:
        raise ValueError("walk length must be >= 1")
    if k == 1:
        return 0.5
    if k == 2:
        return 2.0 / 3.0
    return (random_walk_expectation(k - 2) + 1.0) / 3.0


def between_class_walk(h: float, num_classes: int, steps: int) -> np.ndarray:
    """k-th power of the class-transition matrix with diagonal h and
    off-diagonal (1-h)/(K-1).

    The power stays in the same family: equal diagonal, equal
    off-diagonal, rows summing to one.
    """
    if not 0.0 <= h <= 1.0:
        raise ValueError("h must lie in [0, 1]")
    if num_classes < 2:
        raise ValueError("need at least two classes")
    if steps < 1:
        raise ValueError("steps must be >= 1")
    off = (1.0 - h) / (num_classes - 1)
    p = np.full((num_classes, num_classes), off)
    np.fill_diagonal(p, h)
    return np.linalg.matrix_power(p, steps)


@dataclass
class GapRow:
    hop: int
    train_value: float
    test_value: float
    gap: float


def _hop_homophily(g: Graph, labels: LabelAssignment, hop: int) -> float:
    if hop == 1:
        return edge_homophily(g, labels)
    pi = interaction_probability(g, labels, hop)
    hk = k_homophily_degree(pi, labels.class_sizes, g.num_nodes)
    # Binary degrees live in [-1, 1]; map onto the homophily scale.
    return (hk + 1.0) / 2.0 if labels.num_classes == 2 else hk


def homophily_gap_report(g_train: Graph, g_test: Graph,
                         labels_train: LabelAssignment, labels_test: LabelAssignment,
                         hops=(1, 2)) -> list[GapRow]:
    """Per-hop homophily of both graphs and the absolute train/test gaps.

    1-hop is edge homophily; higher hops use the k-homophily degree
    (sign-normalized for binary labels).
    """
    rows = []
    for hop in hops:
        if hop < 1:
            raise ValueError("hops must be >= 1")
        tr = _hop_homophily(g_train, labels_train, hop)
        te = _hop_homophily(g_test, labels_test, hop)
        rows.append(GapRow(hop=hop, train_value=tr, test_value=te, gap=abs(tr - te)))
    return rows


def format_gap_report(rows: list[GapRow]) -> str:
    lines = [f"{'hop':>4} {'train':>10} {'test':>10} {'gap':>10}"]
    for r in rows:
        lines.append(f"{r.hop:>4} {r.train_value:>10.4f} {r.test_value:>10.4f} {r.gap:>10.4f}")
    return "\n".join(lines)


def write_gap_report_csv(path, rows: list[GapRow]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("hop,train_homophily,test_homophily,gap\n")
        for r in rows:
            fh.write(f"{r.hop},{r.train_value:.17g},{r.test_value:.17g},{r.gap:.17g}\n")
