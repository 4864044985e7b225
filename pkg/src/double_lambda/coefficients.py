"""Drift matrix of the coupled-coherence equations and the four complex
gain coefficients that drive the two-mode master equation.

The cofactor forms used here are the canonical ones (they are exactly
adjugate/determinant of the drift matrix M, which ``drift_matrix`` verifies
on every call).  The alternative main-text forms, which replace (gamma-i*delta)
by [gamma - i(delta + delta_a/2 + delta_b/2)] and drop the +Omega^2 terms in
A11/A22, are available behind ``main_text_variant=True`` purely as a
diagnostic -- at resonance they flip gain into absorption.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .params import SystemParams
from .pump import PumpSteadyState, pump_steady_state_numeric


class DegenerateD(Exception):
    """|D| is numerically zero; the coefficients are undefined."""


class RegimeTag(enum.Enum):
    SU2_IMAGINARY = "SU2_IMAGINARY"    # four equal, purely imaginary
    RESONANT_REAL = "RESONANT_REAL"    # four equal, purely real
    GENERAL = "GENERAL"


@dataclass
class DriftMatrix:
    """3x3 coherence drift matrix (rows/cols ordered bc, ac, dc) plus the
    six cofactors and denominator that enter the gain coefficients."""

    M: np.ndarray
    A11: complex
    A12: complex
    A21: complex
    A22: complex
    A31: complex
    A32: complex
    D: complex


@dataclass
class GainCoefficients:
    alpha1: complex
    alpha2: complex
    alpha12: complex
    alpha21: complex
    kappa1: float
    kappa2: float


def drift_matrix(p: SystemParams, main_text_variant: bool = False) -> DriftMatrix:
    """Assemble M and its cofactors for the parameter point ``p``.

    For the canonical forms the function verifies on every call that
    (A11,A21,A31)/D and (A12,A22,A32)/D are the first two rows of inv(M)
    (left-solve residual <= 1e-10 relative); the variant forms skip the
    check because they fail it by construction.
    """
    g = p.pump.gamma
    om1, om2 = p.pump.omega1, p.pump.omega2
    da, db, d = p.delta_a, p.delta_b, p.delta

    M = np.array([[g - 1j * db, 0.0, 1j * om1],
                  [0.0, g - 1j * da, 1j * om2],
                  [1j * om1, 1j * om2, g - 1j * d]], dtype=complex)

    if main_text_variant:
        F = g - 1j * (d + da / 2 + db / 2)
        A11 = (g - 1j * da) * F
        A22 = (g - 1j * db) * F
        D = ((g - 1j * da) * (g - 1j * db) * F
             + om1**2 * (g - 1j * da) + om2**2 * (g - 1j * db))
    else:
        A11 = (g - 1j * da) * (g - 1j * d) + om2**2
        A22 = (g - 1j * db) * (g - 1j * d) + om1**2
        D = ((g - 1j * da) * (g - 1j * db) * (g - 1j * d)
             + om1**2 * (g - 1j * da) + om2**2 * (g - 1j * db))
    A12 = A21 = -om1 * om2 + 0j
    A31 = -1j * om1 * (g - 1j * da)
    A32 = -1j * om2 * (g - 1j * db)

    scale = (abs((g - 1j * da) * (g - 1j * db) * (g - 1j * d))
             + om1**2 * abs(g - 1j * da) + om2**2 * abs(g - 1j * db) + 1e-300)
    if abs(D) <= 1e-12 * scale:
        raise DegenerateD(f"|D| = {abs(D):.3e} (relative {abs(D)/scale:.1e})")

    if not main_text_variant:
        # inverse-consistency: rows of adj(M)/det(M) left-solve M
        for k, row in enumerate([(A11, A21, A31), (A12, A22, A32)]):
            e = np.zeros(3)
            e[k] = 1.0
            res = np.asarray(row) / D @ M - e
            if np.max(np.abs(res)) > 1e-10 * max(1.0, np.max(np.abs(M)) / abs(D) * np.max(np.abs(row))):
                raise DegenerateD(
                    f"cofactor row {k + 1} fails inverse consistency "
                    f"(residual {np.max(np.abs(res)):.3e})")

    return DriftMatrix(M=M, A11=A11, A12=A12, A21=A21, A22=A22,
                       A31=A31, A32=A32, D=D)


def gain_coefficients(p: SystemParams, s: PumpSteadyState | None = None,
                      main_text_variant: bool = False) -> GainCoefficients:
    """Gain coefficients from the drift cofactors and the pump steady state.

    ``s`` defaults to the (canonical) numeric steady-state path evaluated
    at p.pump.
    """
    if s is None:
        s = pump_steady_state_numeric(p.pump)
    dm = drift_matrix(p, main_text_variant=main_text_variant)
    g1, g2, D = p.g1, p.g2, dm.D
    a1 = g1**2 / D * (dm.A11 * s.L_bb + dm.A21 * s.L_ab + dm.A31 * s.L_db)
    a2 = g2**2 / D * (dm.A12 * s.L_ba + dm.A22 * s.L_aa + dm.A32 * s.L_da)
    a12 = g1 * g2 / D * (dm.A11 * s.L_ba + dm.A21 * s.L_aa + dm.A31 * s.L_da)
    a21 = g1 * g2 / D * (dm.A12 * s.L_bb + dm.A22 * s.L_ab + dm.A32 * s.L_db)
    c = GainCoefficients(alpha1=a1, alpha2=a2, alpha12=a12, alpha21=a21,
                         kappa1=p.kappa1, kappa2=p.kappa2)
    for v in (a1, a2, a12, a21):
        if not np.isfinite(v):
            raise DegenerateD(f"non-finite gain coefficient {v}")
    return c


def classify_regime(c: GainCoefficients, tol: float = 1e-6) -> RegimeTag:
    """Tag the coefficient set: equal-and-imaginary, equal-and-real, or
    neither.  ``tol`` is relative to |alpha1|."""
    ref = abs(c.alpha1)
    if ref == 0.0:
        # pure loss, no gain at all -- neither special class applies
        return RegimeTag.GENERAL
    others = (c.alpha2, c.alpha12, c.alpha21)
    if max(abs(a - c.alpha1) for a in others) > tol * ref:
        return RegimeTag.GENERAL
    if abs(c.alpha1.real) <= tol * ref:
        return RegimeTag.SU2_IMAGINARY
    if abs(c.alpha1.imag) <= tol * ref:
        return RegimeTag.RESONANT_REAL
    return RegimeTag.GENERAL
