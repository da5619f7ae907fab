"""Common container for concrete truncated spectral triples."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from ..operators import DiracData, Op, SpectralTriple, sign_F
from ..series import FitConfig, Growth


@dataclass
class Expectation:
    """A closed-form expected value attached to a model."""

    name: str
    description: str
    evaluate: Callable[[], complex]
    expected: complex
    provenance: str
    tolerance: float


@dataclass(eq=False)
class ModelInstance:
    """A truncated spectral triple with its generators and metadata.

    ``ideal_index`` maps generator labels to the smallest ``l`` with the
    element in the ideal ``I_l``; ``descriptors`` name the exact heat-trace
    expansions of the identity, ``F`` and the grading.
    """

    name: str
    params: dict
    triple: SpectralTriple
    generators: dict[str, Op]
    ideal_index: dict[str, int]
    growth: Growth
    fit: FitConfig
    descriptors: dict[str, str] = field(default_factory=dict)
    interior: np.ndarray | None = None
    expectations: list[Expectation] = field(default_factory=list)

    @property
    def D(self) -> DiracData:
        return self.triple.D

    @property
    def p(self) -> int:
        return self.triple.p

    @property
    def trunc(self):
        return self.triple.trunc

    @property
    def even(self) -> bool:
        return self.triple.even

    def identity(self) -> Op:
        return Op.identity(self.trunc)

    def F(self) -> Op:
        return sign_F(self.D)

    def gamma(self) -> Op:
        return self.triple.gamma_or_one()

    def element(self, label: str) -> Op:
        if label == "1":
            return self.identity()
        try:
            return self.generators[label]
        except KeyError:
            raise KeyError(f"model {self.name!r} has no generator {label!r}") from None

    def filtration(self, label: str) -> int:
        return self.ideal_index.get(label, self.p)
