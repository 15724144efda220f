"""The common carrier for named analytic solutions.

A :class:`SolutionExpr` bundles a pointwise evaluator for the layer stream
functions with its parameter map, a human-readable derivation note, and an
optional predicate marking points where the formula is undefined.  The
evaluator is vectorized: ``evaluate(t, X, Y)`` accepts scalars or ndarrays
and returns the pair (psi1, psi2) in layered variables.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .fields import DomainError

__all__ = ["SolutionExpr", "InvalidParameterError"]


class InvalidParameterError(DomainError):
    """A solution parameter violates the entry's validity predicate."""


@dataclass(frozen=True)
class SolutionExpr:
    name: str
    evaluate: object  # callable (t, X, Y) -> (psi1, psi2)
    params: dict = field(default_factory=dict)
    provenance: str = ""
    singular_locus: object = None  # callable (t, X, Y) -> bool array, or None
    metadata: dict = field(default_factory=dict)

    def __call__(self, t, X, Y):
        return self.evaluate(t, X, Y)

    def renamed(self, name: str) -> "SolutionExpr":
        return SolutionExpr(
            name,
            self.evaluate,
            dict(self.params),
            self.provenance,
            self.singular_locus,
            dict(self.metadata),
        )
