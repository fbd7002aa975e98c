"""Partial epistemic models, action models and distributed task solvability."""
from .actions import (ActionModel, FailurePattern, MPAction, class_of, consensus_task, enumerate_patterns,
                      mp0, mp0_complex, mp_full)
from .complex import Complex, SimplicialModel, Vertex, chi, derive_model, facets, input_model, is_simplicial_map
from .formula import (Formula, alive, build_phi, evaluate, is_guarded_positive, is_valid, parse, to_text,
                      truth_vector)
from .model import (PartialEpistemicModel, check_per, frame_isomorphic, is_proper, saturation,
                    verify_morphism)
from .solvability import (SolvabilityInstance, check_obstruction, check_solution, equivalence_probe, kappa,
                          search_decision_map, search_solution)
from .update import UpdateWorld, pre_class, product_update, world_count_report

__version__ = "0.1.0"

__all__ = [
    "ActionModel",
    "FailurePattern",
    "MPAction",
    "class_of",
    "consensus_task",
    "enumerate_patterns",
    "mp0",
    "mp0_complex",
    "mp_full",
    "Complex",
    "SimplicialModel",
    "Vertex",
    "chi",
    "derive_model",
    "facets",
    "input_model",
    "is_simplicial_map",
    "Formula",
    "alive",
    "build_phi",
    "evaluate",
    "is_guarded_positive",
    "is_valid",
    "parse",
    "to_text",
    "truth_vector",
    "PartialEpistemicModel",
    "check_per",
    "frame_isomorphic",
    "is_proper",
    "saturation",
    "verify_morphism",
    "SolvabilityInstance",
    "check_obstruction",
    "check_solution",
    "equivalence_probe",
    "kappa",
    "search_decision_map",
    "search_solution",
    "UpdateWorld",
    "pre_class",
    "product_update",
    "world_count_report",
]
