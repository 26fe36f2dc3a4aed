"""Bisimilarities, spatial logics and minimisation for finite closure models."""
from .equivalences import (DistinguishingWitness, EquivalenceKind, ap_equivalence, c_bisimilarity,
                           cm_bisimilarity, cmc_bisimilarity, compare, copa_bisimilarity,
                           distinguish, equivalence, find_homeomorphism, is_copa_bisimulation,
                           path_bisimilarity, trace_equivalent, trace_witness)
from .errors import (ClosureBisimError, FormulaSyntaxError, InvalidPartitionError, ModelError,
                     NoWitnessError, TooLargeError, UnknownAtomError)
from .logic import check, evaluate, parse, to_text
from .minimize import MinimizationResult, minimize, verify_quotient
from .model import (Partition, QdModel, closure, disjoint_union, interior, is_connected,
                    is_path_connected, is_walk, min_neighbourhood, quotient, reach, validate)
from .oracles import inl_oracle as inl_bisimilarity_oracle

__version__ = "0.1.0"

__all__ = [
    "DistinguishingWitness", "EquivalenceKind", "ap_equivalence", "c_bisimilarity",
    "cm_bisimilarity", "cmc_bisimilarity", "compare", "copa_bisimilarity", "distinguish",
    "equivalence", "find_homeomorphism", "is_copa_bisimulation", "path_bisimilarity",
    "trace_equivalent", "trace_witness",
    "ClosureBisimError", "FormulaSyntaxError", "InvalidPartitionError", "ModelError",
    "NoWitnessError", "TooLargeError", "UnknownAtomError",
    "check", "evaluate", "parse", "to_text",
    "MinimizationResult", "minimize", "verify_quotient",
    "Partition", "QdModel", "closure", "disjoint_union", "interior", "is_connected",
    "is_path_connected", "is_walk", "min_neighbourhood", "quotient", "reach", "validate",
    "inl_bisimilarity_oracle",
]
