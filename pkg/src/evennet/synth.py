"""Synthetic graph generators: contextual SBM, rings, random regular graphs.

The contextual SBM is parameterized by a single angle-like knob phi in
(-1, 1) trading structural signal (lambda) against feature signal (mu):

    lambda = sqrt(eps) * sin(phi * pi / 2)
    mu     = (sqrt(eps) / m) * sqrt(n / f) * cos(phi * pi / 2)

which inverts phi = arctan(lambda / (m mu) * sqrt(n / f)) * 2 / pi. The
default signal budget eps = 4.23 reproduces the reference operating
points (phi = 0.75 -> lambda = 1.90, mu = 0.37 at n/f = 1.5); it is kept
configurable and is re-derived in the test suite rather than trusted.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .graph import Graph, LabelAssignment, build_graph

M_CONST_DEFAULT = 3.0 * np.sqrt(3.0) / 2.0
EPSILON_DEFAULT = 4.23


def phi_to_lambda_mu(phi: float, n: int, f: int,
                     m_const: float = M_CONST_DEFAULT,
                     epsilon: float = EPSILON_DEFAULT) -> tuple[float, float]:
    """Invert the phi parameterization into (lambda, mu)."""
    if not -1.0 < phi < 1.0:
        raise ValueError(f"phi must lie strictly inside (-1, 1), got {phi}")
    root = np.sqrt(epsilon)
    lam = root * np.sin(phi * np.pi / 2.0)
    mu = (root / m_const) * np.sqrt(n / f) * np.cos(phi * np.pi / 2.0)
    return float(lam), float(mu)


@dataclass
class CsbmParams:
    """Contextual-SBM parameters; lambda/mu are derived from phi on init.

    ``direction_seed`` pins the class-mean direction u to its own stream:
    graphs generated with the same direction seed share the feature/label
    relationship, which is what lets a model trained on one graph say
    anything about another (train/validation/test triples must share it).
    """

    n: int
    f: int
    d: float
    phi: float
    m_const: float = M_CONST_DEFAULT
    epsilon: float = EPSILON_DEFAULT
    direction_seed: int | None = None
    lam: float = field(init=False)
    mu: float = field(init=False)

    def __post_init__(self):
        if self.n < 2 or self.n % 2 != 0:
            raise ValueError("n must be an even count >= 2 (two equal classes)")
        if self.f < 1:
            raise ValueError("feature dimension must be >= 1")
        self.lam, self.mu = phi_to_lambda_mu(self.phi, self.n, self.f,
                                             self.m_const, self.epsilon)
        if self.mu > 0:
            phi_back = np.arctan(self.lam / (self.m_const * self.mu)
                                 * np.sqrt(self.n / self.f)) * 2.0 / np.pi
            if abs(phi_back - self.phi) > 1e-9:
                raise ValueError("phi parameterization failed to round-trip")
        if self.lam ** 2 + (self.mu * self.f / self.n) ** 2 <= 1.0:
            raise ValueError(
                "uninformative parameters: lambda^2 + mu^2 f^2 / n^2 must exceed 1"
            )
        if self.d + abs(self.lam) * np.sqrt(self.d) >= self.n:
            raise ValueError("edge probabilities leave [0, 1]: d + |lambda| sqrt(d) >= n")
        if self.d - abs(self.lam) * np.sqrt(self.d) < 0:
            raise ValueError("edge probabilities leave [0, 1]: d - |lambda| sqrt(d) < 0")

    def to_dict(self) -> dict:
        return {
            "n": self.n, "f": self.f, "d": self.d, "phi": self.phi,
            "m_const": self.m_const, "epsilon": self.epsilon,
            "direction_seed": self.direction_seed,
            "lambda": self.lam, "mu": self.mu,
        }


def generate_csbm(p: CsbmParams, seed: int):
    """Draw (Graph, features, labels) from the contextual SBM.

    Two equal classes on shuffled node ids. Feature rows are
    sqrt(mu/n) y_i u + Z_i / sqrt(f) with u ~ N(0, I/f) and Z standard
    normal. Each unordered pair is an edge independently with probability
    (d + lambda sqrt(d)) / n within a class and (d - lambda sqrt(d)) / n
    across classes.
    """
    rng = np.random.default_rng(seed)
    n, f = p.n, p.f
    half = n // 2
    classes = np.zeros(n, dtype=np.int64)
    classes[half:] = 1
    classes = classes[rng.permutation(n)]
    labels = LabelAssignment.from_classes(classes, num_classes=2)
    y = np.where(classes == 0, 1.0, -1.0)

    if p.direction_seed is None:
        u = rng.normal(0.0, 1.0 / np.sqrt(f), size=f)
    else:
        u = np.random.default_rng(p.direction_seed).normal(0.0, 1.0 / np.sqrt(f), size=f)
    z = rng.standard_normal((n, f))
    features = np.sqrt(p.mu / n) * y[:, None] * u[None, :] + z / np.sqrt(f)

    p_in = (p.d + p.lam * np.sqrt(p.d)) / n
    p_out = (p.d - p.lam * np.sqrt(p.d)) / n
    draws = rng.random((n, n))
    same = y[:, None] * y[None, :] > 0
    prob = np.where(same, p_in, p_out)
    upper = np.triu(np.ones((n, n), dtype=bool), k=1)
    rows, cols = np.nonzero(upper & (draws < prob))
    g = build_graph(np.column_stack([rows, cols]), n)
    return g, features, labels


def expected_csbm_homophily(p: CsbmParams) -> float:
    """Analytic expectation of edge homophily: (d + lambda sqrt(d)) / (2d)."""
    return (p.d + p.lam * np.sqrt(p.d)) / (2.0 * p.d)


def ring_graph(num_nodes: int, labeling: str = "alternating"):
    """Even cycle with one of three label patterns.

    ``alternating`` gives edge homophily 0, ``blocked`` (two contiguous
    arcs) gives 1 - 2/N, and ``same`` puts every node in class 0 for the
    fully homophilic case.
    """
    n = num_nodes
    if n < 4 or n % 2 != 0:
        raise ValueError(f"ring needs an even node count >= 4, got {n}")
    edges = [(i, (i + 1) % n) for i in range(n)]
    g = build_graph(edges, n)
    if labeling == "alternating":
        classes = np.arange(n) % 2
    elif labeling == "blocked":
        classes = (np.arange(n) >= n // 2).astype(np.int64)
    elif labeling == "same":
        classes = np.zeros(n, dtype=np.int64)
    else:
        raise ValueError(f"unknown labeling {labeling!r}")
    return g, LabelAssignment.from_classes(classes, num_classes=2)


def _pairing_round(rng, n: int, k: int):
    """One pairing attempt: shuffle stubs, pair them off, rejecting any pair
    that would create a self-loop or duplicate edge and reshuffling the
    leftovers. Returns the edge set or None when stuck."""
    edges: set = set()
    stubs = np.repeat(np.arange(n, dtype=np.int64), k)
    while len(stubs):
        stubs = rng.permutation(stubs)
        unmatched = []
        for i in range(0, len(stubs) - 1, 2):
            u, v = int(stubs[i]), int(stubs[i + 1])
            key = (u, v) if u < v else (v, u)
            if u == v or key in edges:
                unmatched.extend((u, v))
            else:
                edges.add(key)
        if len(unmatched) == len(stubs):
            return None
        stubs = np.array(unmatched, dtype=np.int64)
    return edges


def random_regular_graph(n: int, k: int, seed: int, max_retries: int = 1000) -> Graph:
    """Exactly k-regular simple graph via the pairing model.

    Pairs creating self-loops or duplicate edges are rejected and their
    stubs reshuffled; a stuck attempt restarts, up to ``max_retries``.
    """
    if (n * k) % 2 != 0:
        raise ValueError(f"n*k must be even, got n={n}, k={k}")
    if not 0 < k < n:
        raise ValueError(f"need 0 < k < n, got n={n}, k={k}")
    rng = np.random.default_rng(seed)
    for _ in range(max_retries):
        edges = _pairing_round(rng, n, k)
        if edges is not None:
            return build_graph(sorted(edges), n)
    raise RuntimeError(
        f"could not realize a simple {k}-regular graph on {n} nodes "
        f"in {max_retries} pairing attempts"
    )


def two_state_walk_probability(h: float, k: int) -> float:
    """Closed-form same-class probability of a k-step two-state chain:
    ((2h - 1)^k + 1) / 2 for per-step same-class probability h."""
    if not 0.0 <= h <= 1.0:
        raise ValueError("h must lie in [0, 1]")
    if k < 1:
        raise ValueError("walk length must be >= 1")
    return ((2.0 * h - 1.0) ** k + 1.0) / 2.0
