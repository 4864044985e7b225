"""Closed-form references for the two special coefficient regimes.

With four equal purely imaginary coefficients (i*alpha) and no cavity loss
the master equation is Hamiltonian and generates beam-splitter (SU(2))
rotations between the modes; with four equal real coefficients (beta) it is
a phase-insensitive amplifier.  Both admit closed forms used as oracles.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class SU2Params:
    alpha: float   # rotation rate (coefficients are i*alpha)
    t: float


@dataclass
class FockAmplitudes:
    """State on the total-photon-number-N sector: amps[n] multiplies
    |n, N-n> (n photons in mode 1)."""

    N: int
    amps: np.ndarray


def su2_state_0N(N: int, p: SU2Params) -> FockAmplitudes:
    """Evolution of |0, N> under the beam-splitter rotation.

    amps[n] = binom(N,n)^(1/2) (cos at)^(N-n) (i sin at)^n -- the stable
    equivalent of the (cos)^(N/2) (i tan)^n form, exactly unit-norm by the
    binomial theorem (so no removable singularity at at = pi/2).
    """
    if N < 0:
        raise ValueError("N must be >= 0")
    th = p.alpha * p.t
    c, s = math.cos(th), math.sin(th)
    amps = np.array([math.sqrt(math.comb(N, n)) * c ** (N - n) * (1j * s) ** n
                     for n in range(N + 1)], dtype=complex)
    return FockAmplitudes(N=N, amps=amps)


def su2_coherent_evolution(beta1: complex, beta2: complex,
                           p: SU2Params) -> tuple[complex, complex]:
    """Coherent states stay coherent: amplitudes rotate into each other."""
    th = p.alpha * p.t
    c, s = math.cos(th), math.sin(th)
    b1, b2 = complex(beta1), complex(beta2)
    return (b1 * c + 1j * b2 * s, b2 * c + 1j * b1 * s)


def su2_witness_fock(n1: int, n2: int, p: SU2Params) -> float:
    """Witness E(t) for initial |n1, n2> under the SU(2) rotation."""
    if n1 < 0 or n2 < 0:
        raise ValueError("occupations must be >= 0")
    s2 = math.sin(2 * p.alpha * p.t) ** 2
    return n1 * n2 - 0.25 * (n1 + n2 + 2 * n1 * n2) * s2


def entanglement_condition(n1: int, n2: int) -> bool:
    """True iff the SU(2) rotation of |n1, n2> ever drives E below zero,
    i.e. 2 n1 n2 < n1 + n2."""
    if n1 < 0 or n2 < 0:
        raise ValueError("occupations must be >= 0")
    return 2 * n1 * n2 < n1 + n2


def resonant_witness_fock(n1: int, n2: int, beta: float, t: float) -> float:
    """Witness E(t) for initial |n1, n2> under four equal real coefficients
    beta with no loss.  Non-negative for beta*t >= 0: the amplifier never
    entangles number states."""
    if n1 < 0 or n2 < 0:
        raise ValueError("occupations must be >= 0")
    e4 = math.exp(4 * beta * t)
    e8 = math.exp(8 * beta * t)
    return ((n1 + n2) / 16 * (3 * e8 + 2 * e4 - 5)
            + n1 * n2 / 8 * (1 + 6 * e4 + e8)
            + 0.25 * (1 + e8 - 2 * e4))
