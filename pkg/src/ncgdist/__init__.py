"""Spectral distance on finite spectral triples, with a catalog of closed forms."""
from .algebra import (Algebra, AlgebraElement, BlochPoint, State, bloch_of_state, mix_states,
                      random_pure_state, random_state, state_from_json, state_of_bloch,
                      state_to_json)
from .solver import (ConvergenceError, DistanceResult, Outcome, SolverOptions, is_finite,
                     oracle_lower_bound, segment_check, spectral_distance)
from .triple import (Representation, SpectralTriple, graph_triple, m2_diagonal_triple,
                     product_state, product_triples, project_triple, seminorm, seminorm_kernel,
                     sphere_point_triple, triple_from_json, triple_to_json, truncated_moyal_triple,
                     two_point_triple)
from .kantorovich import kantorovich_bracket, sample_pure_pairs, wasserstein_upper
from . import bundle, catalog, closed_forms, moyal

__version__ = "0.1.0"
