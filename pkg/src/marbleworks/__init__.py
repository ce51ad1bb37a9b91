"""Workbench for unary-output marble, blind, and pebble bimachines.

The package covers four layers: finite monoids and free-monoid morphisms
(``algebra``), nested bimachines with their productions (``machines``,
``products``), rational-series combinators over regular functions
(``series``), bounded-height factorization forests (``forest``), and the
decision machinery built on top of them (``decide``).  ``oracle`` holds the
brute-force reference implementations used by the test suite.
"""

from .algebra import FiniteMonoid, Morphism, monoid_validate
from .machines import Bimachine, NestedMachine, eval_machine

__all__ = [
    "FiniteMonoid",
    "Morphism",
    "monoid_validate",
    "Bimachine",
    "NestedMachine",
    "eval_machine",
]
