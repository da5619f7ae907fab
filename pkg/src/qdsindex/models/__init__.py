"""Concrete spectral triples: the circle, the two-sphere and the noncommutative torus."""

from __future__ import annotations

from .base import Expectation, ModelInstance
from .circle import circle_model
from .sphere import (
    harmonic_element_3j,
    harmonic_element_quadrature,
    sphere_form_integral,
    sphere_model,
    spin_harmonic,
    wigner_small_d,
)
from .torus import DEFAULT_THETA, nctorus_closed_values, nctorus_model
from .wigner import wigner3j

__all__ = [
    "DEFAULT_THETA",
    "Expectation",
    "ModelInstance",
    "build_model",
    "circle_model",
    "harmonic_element_3j",
    "harmonic_element_quadrature",
    "nctorus_closed_values",
    "nctorus_model",
    "sphere_form_integral",
    "sphere_model",
    "spin_harmonic",
    "wigner3j",
    "wigner_small_d",
]


def build_model(name: str, *, Lambda: int | None = None, lmax: int | None = None, theta: float | None = None) -> ModelInstance:
    """Construct a model by name with optional size parameters."""
    if name == "circle":
        return circle_model(Lambda if Lambda is not None else 200)
    if name == "sphere":
        return sphere_model(lmax if lmax is not None else 40)
    if name == "torus":
        return nctorus_model(theta if theta is not None else DEFAULT_THETA, Lambda if Lambda is not None else 60)
    raise KeyError(f"unknown model {name!r}; expected circle, sphere or torus")
