"""Blind register automata over monoids and the group word problems they accept."""
from .automata import (
    DeterministicMAutomaton,
    Edge,
    MAutomaton,
    RunBounds,
    between_terminal_fa,
    find_identity_register_path,
    language_agreement,
    run_deterministic,
    run_nondeterministic,
    underlying_automaton,
)
from .constructions import (
    Bounds,
    EmbeddingSpec,
    extract_embedding,
    schreier_construct,
    verify_main_theorem,
)
from .groups import GroupOracle, InvolutiveAlphabet, SubgroupOracle, coset_enumerate
from .kernels import BACKEND
from .monoids import parse_descriptor

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "Bounds",
    "DeterministicMAutomaton",
    "Edge",
    "EmbeddingSpec",
    "GroupOracle",
    "InvolutiveAlphabet",
    "MAutomaton",
    "RunBounds",
    "SubgroupOracle",
    "between_terminal_fa",
    "coset_enumerate",
    "extract_embedding",
    "find_identity_register_path",
    "language_agreement",
    "parse_descriptor",
    "run_deterministic",
    "run_nondeterministic",
    "schreier_construct",
    "underlying_automaton",
    "verify_main_theorem",
]
