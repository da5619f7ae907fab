"""The circle: ``D = -i d/dtheta`` on ``l^2(Z)`` with the bilateral shift."""

from __future__ import annotations

import numpy as np
import scipy.sparse as sp

from ..errors import PreconditionError
from ..operators import DiracData, HilbertTruncation, Op, SpectralTriple
from ..series import FitConfig, Growth
from .base import ModelInstance

MARGIN = 4


def circle_model(Lambda: int = 200) -> ModelInstance:
    """Odd triple on ``e_n``, ``|n| <= Lambda``, with ``D e_n = n e_n`` and ``z e_n = e_{n+1}``."""
    if Lambda < 4:
        raise PreconditionError("Lambda must be at least 4")
    ns = np.arange(-Lambda, Lambda + 1)
    trunc = HilbertTruncation(f"circle[{Lambda}]", ns.size, tuple(int(n) for n in ns))
    D = DiracData(trunc, ns.astype(float), summability_p=1, spectral_cutoff=float(Lambda - MARGIN))
    z = Op(trunc, sp.eye(ns.size, ns.size, k=-1, dtype=np.complex128, format="csr"))
    return ModelInstance(
        name="circle",
        params={"lambda": Lambda},
        triple=SpectralTriple(D, None, name="circle"),
        generators={"z": z, "zbar": z.H},
        ideal_index={"z": 1, "zbar": 1},
        growth=Growth(C=3.0, q=1.0),
        fit=FitConfig(kernel="gauss", R=10, t_max=0.5),
        descriptors={"unit": "circle", "F": "circle-F"},
        interior=np.abs(ns) <= Lambda - MARGIN,
    )
