"""Steady state of the classically pumped atom (no cavity fields).

Two independent routes to the same object:

* ``pump_steady_state_numeric`` assembles the nine-element Bloch system for
  the levels {a, b, d} (rho_cc decays to zero and decouples) and solves it
  directly.  This path is canonical.
* ``pump_steady_state_closed_form`` evaluates the published closed-form
  expressions verbatim.  Those expressions carry known transcription
  problems (see ``reconcile_steady_paths``), which is exactly why both
  routes exist.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .params import PumpParams

# order of the unknowns in the dense solve
_ELEMS = ["aa", "bb", "dd", "ab", "ba", "ad", "da", "bd", "db"]
_IDX = {k: i for i, k in enumerate(_ELEMS)}


class DegenerateDenominator(Exception):
    """Closed-form denominator a1*a2 - b**2 is (numerically) zero."""


class SingularSystem(Exception):
    """The Bloch steady-state linear system is numerically singular."""


@dataclass
class PumpSteadyState:
    """Zero-order atomic steady state.

    y1, y2, y3 are the closed-form intermediates (population-difference
    combinations); the L factors are the coherence/population elements that
    feed the gain coefficients; rho0 maps 'xy' -> rho0_xy over x,y in
    {a,b,d} plus 'cc' (identically zero).
    """

    y1: complex
    y2: complex
    y3: complex
    L_aa: complex
    L_bb: complex
    L_ab: complex
    L_ba: complex
    L_da: complex
    L_db: complex
    rho0: dict = field(default_factory=dict)


def _bloch_matrix(p: PumpParams):
    """Coefficient matrix A and source b of the steady system A x = b."""
    om1, om2, d1, d2, g = p.omega1, p.omega2, p.delta1, p.delta2, p.gamma
    A = np.zeros((9, 9), complex)
    b = np.zeros(9, complex)

    def add(row, col, val):
        A[_IDX[row], _IDX[col]] += val

    # populations: decay balanced by the classical drives
    add("bb", "bb", -g); add("bb", "db", -1j * om1); add("bb", "bd", 1j * om1)
    add("aa", "aa", -g); add("aa", "da", -1j * om2); add("aa", "ad", 1j * om2)
    # upper-level coherence ba and its conjugate
    add("ba", "ba", -(g - 1j * (d2 - d1)))
    add("ba", "bd", 1j * om2); add("ba", "da", -1j * om1)
    add("ab", "ab", -(g + 1j * (d2 - d1)))
    add("ab", "db", -1j * om2); add("ab", "ad", 1j * om1)
    # drive coherences (a-channel at delta1, b-channel at delta2)
    add("da", "da", -(g + 1j * d1))
    add("da", "aa", -1j * om2); add("da", "dd", 1j * om2); add("da", "ba", -1j * om1)
    add("ad", "ad", -(g - 1j * d1))
    add("ad", "aa", 1j * om2); add("ad", "dd", -1j * om2); add("ad", "ab", 1j * om1)
    add("db", "db", -(g + 1j * d2))
    add("db", "ab", -1j * om2); add("db", "bb", -1j * om1); add("db", "dd", 1j * om1)
    add("bd", "bd", -(g - 1j * d2))
    add("bd", "ba", 1j * om2); add("bd", "bb", 1j * om1); add("bd", "dd", -1j * om1)
    # injected ground level
    add("dd", "dd", -g)
    add("dd", "bd", -1j * om1); add("dd", "db", 1j * om1)
    add("dd", "ad", -1j * om2); add("dd", "da", 1j * om2)
    b[_IDX["dd"]] = -p.r_in  # A x + r_in e_dd = 0
    return A, b


def pump_steady_state_numeric(p: PumpParams) -> PumpSteadyState:
    """Solve the Bloch steady state by dense complex linear solve."""
    A, b = _bloch_matrix(p)
    try:
        x = np.linalg.solve(A, b)
    except np.linalg.LinAlgError as exc:
        raise SingularSystem(str(exc)) from exc
    resid = np.max(np.abs(A @ x - b))
    if resid > 1e-12 * max(p.r_in, 1.0):
        raise SingularSystem(f"steady-state residual {resid:.3e} too large")
    rho = {k: x[i] for k, i in _IDX.items()}
    rho["cc"] = 0.0 + 0.0j
    return PumpSteadyState(
        y1=rho["ab"] - rho["ba"],
        y2=rho["db"] - rho["bd"],
        y3=rho["da"] - rho["ad"],
        L_aa=rho["aa"], L_bb=rho["bb"],
        L_ab=rho["ab"], L_ba=rho["ba"],
        L_da=rho["da"], L_db=rho["db"],
        rho0=rho)


def pump_steady_state_closed_form(p: PumpParams) -> PumpSteadyState:
    """Evaluate the published closed form exactly as written.

    Known caveats (flagged by reconcile_steady_paths, numeric canonical):
    the printed y2/y3 numerators are crossed relative to their use in the
    L factors, and the printed L_ab carries two sign slips.  Symmetric
    points (omega1=omega2, delta1=delta2) hide the y-crossing but not the
    L_ab problem.
    """
    om1, om2, d1, d2, g, r = (p.omega1, p.omega2, p.delta1, p.delta2,
                              p.gamma, p.r_in)
    s = g**2 + om1**2 + om2**2 + (d2 - d1) ** 2
    M1 = g**2 + 4 * om1**2 + om2**2 + d2**2
    M2 = g**2 + 4 * om2**2 + om1**2 + d1**2
    a1 = M1 * s - om2**2 * (2 * d2 - d1) ** 2
    a2 = M2 * s - om1**2 * (2 * d1 - d2) ** 2
    b = om1 * om2 * (3 * s - (d1 - 2 * d2) * (2 * d1 - d2))
    den = a1 * a2 - b**2
    scale = abs(a1 * a2) + b**2 + 1e-300
    if abs(den) <= 1e-12 * scale:
        raise DegenerateDenominator(
            f"a1*a2 - b^2 = {den:.3e} (relative {abs(den)/scale:.1e})")
    y2 = 2j * r * s * (a1 * om2 - b * om1) / den
    y3 = 2j * r * s * (a2 * om1 - b * om2) / den
    y1 = (om2 * (d1 - 2 * d2) * y2 + om1 * (2 * d1 - d2) * y3) / s

    def L_ab_of(y1, y2, y3, om1, om2, d1, d2):
        # verbatim printed form (bracket sign and third term as published)
        return ((g + 1j * (d2 - d1)) / (2 * g) * y1
                - 1j * om2 / (2 * g) * y2
                + 1j * om1 / (2 * g) * y3)

    L_aa = (-1j * om2 / g) * y3
    L_bb = (-1j * om1 / g) * y2
    L_db = (g - 1j * d2) / (2 * g) * y2 - 1j * om2 / (2 * g) * y1
    L_da = (g - 1j * d1) / (2 * g) * y3 + 1j * om1 / (2 * g) * y1
    L_ab = L_ab_of(y1, y2, y3, om1, om2, d1, d2)
    # L_ba by the documented 1<->2 swap; y1 is odd under the relabeling
    L_ba = L_ab_of(-y1, y3, y2, om2, om1, d2, d1)

    dd = (r + 1j * om1 * y2 + 1j * om2 * y3) / g  # dd balance supplement
    rho = {
        "aa": L_aa, "bb": L_bb, "dd": dd,
        "ab": L_ab, "ba": L_ba,
        "da": L_da, "ad": np.conj(L_da),
        "db": L_db, "bd": np.conj(L_db),
        "cc": 0.0 + 0.0j,
    }
    return PumpSteadyState(y1=y1, y2=y2, y3=y3,
                           L_aa=L_aa, L_bb=L_bb, L_ab=L_ab, L_ba=L_ba,
                           L_da=L_da, L_db=L_db, rho0=rho)


@dataclass
class DiscrepancyReport:
    """Element-wise comparison of the two steady-state routes."""

    rel_diff: dict            # name -> relative difference
    max_rel_diff: float
    flagged: list             # names with rel diff > threshold
    threshold: float = 1e-8


def _rel(a, b, floor=0.0):
    # elements negligible against the overall state scale compare as equal;
    # without the floor a 1e-16 rounding residue next to an exact 0 would
    # read as a 100% discrepancy
    den = max(abs(a), abs(b), floor)
    if den == 0.0:
        return 0.0
    return abs(a - b) / den


def reconcile_steady_paths(p: PumpParams) -> DiscrepancyReport:
    """Compare closed-form vs numeric steady state element by element.

    Differences above 1e-8 mark closed-form transcription problems; the
    numeric path is canonical either way.
    """
    cf = pump_steady_state_closed_form(p)
    nm = pump_steady_state_numeric(p)
    pairs = {
        "y1": (cf.y1, nm.y1), "y2": (cf.y2, nm.y2), "y3": (cf.y3, nm.y3),
        "L_aa": (cf.L_aa, nm.L_aa), "L_bb": (cf.L_bb, nm.L_bb),
        "L_ab": (cf.L_ab, nm.L_ab), "L_ba": (cf.L_ba, nm.L_ba),
        "L_da": (cf.L_da, nm.L_da), "L_db": (cf.L_db, nm.L_db),
    }
    for k in cf.rho0:
        pairs[f"rho_{k}"] = (cf.rho0[k], nm.rho0[k])
    scale = max(max(abs(a), abs(b)) for a, b in pairs.values())
    rel = {k: _rel(a, b, 1e-6 * scale) for k, (a, b) in pairs.items()}
    flagged = sorted(k for k, v in rel.items() if v > 1e-8)
    return DiscrepancyReport(rel_diff=rel,
                             max_rel_diff=max(rel.values()),
                             flagged=flagged)
