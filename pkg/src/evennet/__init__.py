"""Spectral graph-learning laboratory.

Even-order polynomial graph filters and their full-order counterparts,
homophily and spectral diagnostics, contextual-SBM generators, structural
attack protocols, and the experiment harness tying them together.
"""

from .attacks import AttackSpec, PerturbationLedger, dice_evasion, random_attack, replay_ledger
from .filters import EVEN, FULL, PolyFilter, apply, eval_function, even_odd_decompose, ppr_init
from .graph import (
    Graph,
    LabelAssignment,
    build_graph,
    edge_homophily,
    normalized_laplacian_dense,
    propagate,
    unnormalized_laplacian_dense,
    validate_features,
)
from .harness import (
    ExperimentConfig,
    ResultTable,
    load_dataset,
    run_attack_curves,
    run_generalization,
)
from .homophily import (
    InteractionMatrix,
    between_class_walk,
    coefficient_reexpansion,
    homophily_gap_report,
    interaction_probability,
    k_homophily_degree,
    random_walk_expectation,
    transformed_homophily,
    transformed_homophily_moments,
)
from .model import ModelParams, TrainConfig, TrainReport, evaluate, forward, train
from .properties import run_property_suite
from .spectral import (
    SpectralDecomposition,
    dirichlet_energy,
    eigendecompose,
    homophily_energy_residual,
    label_spectrum,
    ring_basis,
    ring_srl_gap,
    srl,
)
from .synth import (
    CsbmParams,
    generate_csbm,
    phi_to_lambda_mu,
    random_regular_graph,
    ring_graph,
    two_state_walk_probability,
)

__version__ = "0.1.0"
