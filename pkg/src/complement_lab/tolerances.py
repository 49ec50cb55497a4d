"""Numerical tolerances shared by every module.

All thresholds live in one frozen record. Setting ``COMPLEMENT_LAB_TOL`` in
the environment multiplies every entry by the given factor.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, fields, replace

ENV_VAR = "COMPLEMENT_LAB_TOL"


@dataclass(frozen=True)
class Tolerances:
    herm: float = 1e-10
    idem: float = 1e-10
    comm: float = 1e-10
    angle: float = 1e-8
    # relative to the largest singular value
    rank: float = 1e-10
    norm: float = 1e-10
    psd: float = 1e-10
    # distance of a projector eigenvalue from {0, 1}
    eig: float = 1e-8
    # relative to the spectral radius
    cluster: float = 1e-8
    # relative to max(1, |point|) when matching eigenvalues to isolated points
    point: float = 1e-9

    def scaled(self, factor: float) -> Tolerances:
        if not factor > 0:
            raise ValueError(f"tolerance scale must be positive, got {factor!r}")
        return replace(self, **{f.name: getattr(self, f.name) * factor for f in fields(self)})

    @classmethod
    def from_env(cls) -> Tolerances:
        raw = os.environ.get(ENV_VAR)
        if raw is None or raw.strip() == "":
            return cls()
        try:
            factor = float(raw)
        except ValueError:
            raise ValueError(f"{ENV_VAR} must be a positive number, got {raw!r}") from None
        return cls().scaled(factor)


def resolve(tol: Tolerances | None) -> Tolerances:
    return Tolerances.from_env() if tol is None else tol
