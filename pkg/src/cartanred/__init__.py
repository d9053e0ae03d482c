"""Exact Cartan calculus on Lie-Rinehart algebras, observables of closed forms and their reduction."""

from .exactlin import ExactMatrix, Quotient, Subspace
from .liering import LieRinehartInstance, LRElement, load_instance
from .multivec import Multivector, schouten, wedge
from .cartan import CEForm, contract, dce, lie_derivative
from .observables import Brackets, Cocycle, HamPair, ham_pairs
from .constraint import ConstraintLR, ConstraintTriple, constraint_ce
from .report import Report

__version__ = "0.1.0"

__all__ = [
    "Brackets",
    "CEForm",
    "Cocycle",
    "ConstraintLR",
    "ConstraintTriple",
    "ExactMatrix",
    "HamPair",
    "LRElement",
    "LieRinehartInstance",
    "Multivector",
    "Quotient",
    "Report",
    "Subspace",
    "constraint_ce",
    "contract",
    "dce",
    "ham_pairs",
    "lie_derivative",
    "load_instance",
    "schouten",
    "wedge",
]
