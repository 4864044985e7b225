"""Parameter containers for the driven double-Lambda cavity system."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass


@dataclass(frozen=True)
class PumpParams:
    """Classical-drive / injection parameters of the atomic medium.

    omega1, omega2 : Rabi frequencies of the two classical fields (real,
        non-negative; drive phases are absorbed into the atomic basis).
        omega1 drives b<->d, omega2 drives a<->d.
    delta1, delta2 : classical channel detunings.  Note the crossed naming:
        delta1 belongs to the a-channel (rho_da rotates at delta1, driven by
        omega2) and delta2 to the b-channel (rho_db, driven by omega1).
    gamma : common decay rate of all four atomic levels (> 0).
    r_in : incoherent injection rate into the ground level |d>.
    """

    omega1: float
    omega2: float
    delta1: float = 0.0
    delta2: float = 0.0
    gamma: float = 1.0
    r_in: float = 1.0

    def __post_init__(self):
        if self.gamma <= 0:
            raise ValueError("gamma must be > 0")
        if self.omega1 < 0 or self.omega2 < 0:
            raise ValueError("omega1/omega2 must be >= 0 (phases are absorbed)")
        if self.r_in < 0:
            raise ValueError("r_in must be >= 0")

    def swapped(self) -> "PumpParams":
        """The 1<->2 relabeled pump (omega1<->omega2, delta1<->delta2)."""
        return dataclasses.replace(
            self, omega1=self.omega2, omega2=self.omega1,
            delta1=self.delta2, delta2=self.delta1)


@dataclass(frozen=True)
class SystemParams:
    """Full parameter set: cavity couplings/losses plus the atomic pump.

    The channel detunings are always derived from the field detunings,
    delta1 = delta_a - delta and delta2 = delta_b - delta; the `pump`
    attribute is rebuilt with those values on construction, so a stale
    delta1/delta2 on the supplied PumpParams is never trusted.
    """

    g1: float
    g2: float
    delta_a: float
    delta_b: float
    delta: float
    kappa1: float
    kappa2: float
    pump: PumpParams

    def __post_init__(self):
        if self.kappa1 < 0 or self.kappa2 < 0:
            raise ValueError("kappa1/kappa2 must be >= 0")
        object.__setattr__(self, "pump", dataclasses.replace(
            self.pump,
            delta1=self.delta_a - self.delta,
            delta2=self.delta_b - self.delta))
