"""Brute-force master-equation integrator on a truncated two-mode Fock
space; the independent ground truth for the moment system.

The density matrix lives on |n1, n2><m1, m2| with ni, mi < cutoff_i, stored
dense (row index n1*cutoff2 + n2); the Liouvillian is only ever built as a
sparse matrix acting on vec(rho) via vec(A rho B) = kron(A, B^T) vec(rho),
or applied term-by-term with sparse ladder operators -- never as a dense
superoperator.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.sparse as sps

from .coefficients import GainCoefficients
from .moments import IX, MomentState


class TruncationLeak(Exception):
    """Boundary population crossed 1e-6: the truncated evolution is no
    longer trustworthy.  Carries the trusted partial series."""

    def __init__(self, msg, series=None, t_leak=None, leak=None):
        super().__init__(msg)
        self.series = series or []
        self.t_leak = t_leak
        self.leak = leak


@dataclass
class TwoModeDensityMatrix:
    cutoff1: int
    cutoff2: int
    rho: np.ndarray

    def __post_init__(self):
        d = self.cutoff1 * self.cutoff2
        self.rho = np.asarray(self.rho, dtype=complex).reshape(d, d)

    @property
    def dim(self) -> int:
        return self.cutoff1 * self.cutoff2

    def trace(self) -> complex:
        return np.trace(self.rho)

    def boundary_population(self) -> float:
        """Total population with n1 = cutoff1-1 or n2 = cutoff2-1."""
        grid = self.rho.diagonal().real.reshape(self.cutoff1, self.cutoff2)
        return grid[-1, :].sum() + grid[:, -1].sum() - grid[-1, -1]


def fock_density(n1: int, n2: int, cutoff1: int,
                 cutoff2: int) -> TwoModeDensityMatrix:
    if not (0 <= n1 < cutoff1 and 0 <= n2 < cutoff2):
        raise ValueError("occupations must sit inside the cutoffs")
    rho = np.zeros((cutoff1 * cutoff2, cutoff1 * cutoff2), complex)
    i = n1 * cutoff2 + n2
    rho[i, i] = 1.0
    return TwoModeDensityMatrix(cutoff1, cutoff2, rho)


def coherent_density(beta1: complex, beta2: complex, cutoff1: int,
                     cutoff2: int) -> TwoModeDensityMatrix:
    """|beta1>|beta2> truncated and renormalized to unit trace."""
    def amps(beta, cutoff):
        n = np.arange(cutoff)
        logfact = np.cumsum(np.log(np.maximum(n, 1)))
        a = np.exp(-abs(beta) ** 2 / 2) * np.power(complex(beta), n) \
            / np.exp(logfact / 2)
        return a
    psi = np.kron(amps(beta1, cutoff1), amps(beta2, cutoff2))
    psi = psi / np.linalg.norm(psi)
    return TwoModeDensityMatrix(cutoff1, cutoff2, np.outer(psi, psi.conj()))


@lru_cache(maxsize=8)
def _mode_ops(cutoff1: int, cutoff2: int):
    """Sparse annihilation operators (a1, a2) on the joint space."""
    def ladder(c):
        return sps.diags(np.sqrt(np.arange(1, c)), 1, format="csr",
                         dtype=complex)
    I1 = sps.identity(cutoff1, format="csr", dtype=complex)
    I2 = sps.identity(cutoff2, format="csr", dtype=complex)
    a1 = sps.kron(ladder(cutoff1), I2, format="csr")
    a2 = sps.kron(I1, ladder(cutoff2), format="csr")
    return a1, a2


def liouvillian_apply(rho: TwoModeDensityMatrix,
                      c: GainCoefficients) -> TwoModeDensityMatrix:
    """rho_dot, by direct sparse ladder-operator products on rho."""
    if rho.cutoff1 < 2 or rho.cutoff2 < 2:
        raise ValueError("cutoffs must be >= 2")
    a1, a2 = _mode_ops(rho.cutoff1, rho.cutoff2)
    a1d, a2d = a1.conj().T.tocsr(), a2.conj().T.tocsr()
    al1, al2, al12, al21 = c.alpha1, c.alpha2, c.alpha12, c.alpha21
    ac1, ac2, ac12, ac21 = (np.conj(al1), np.conj(al2),
                            np.conj(al12), np.conj(al21))
    k1, k2 = c.kappa1, c.kappa2
    r = rho.rho
    N1, N2 = a1d @ a1, a2d @ a2
    out = (
        -k1 * (N1 @ r + r @ N1 - 2 * (a1 @ r @ a1d))
        - k2 * (N2 @ r + r @ N2 - 2 * (a2 @ r @ a2d))
        - al1 * (r @ (a1 @ a1d)) - ac1 * ((a1 @ a1d) @ r)
        + (al1 + ac1) * (a1d @ r @ a1)
        - al2 * (r @ (a2 @ a2d)) - ac2 * ((a2 @ a2d) @ r)
        + (al2 + ac2) * (a2d @ r @ a2)
        - al12 * (r @ (a2 @ a1d)) + al12 * (a1d @ r @ a2)
        - ac12 * ((a1 @ a2d) @ r) + ac12 * (a2d @ r @ a1)
        - al21 * (r @ (a1 @ a2d)) + al21 * (a2d @ r @ a1)
        - ac21 * ((a2 @ a1d) @ r) + ac21 * (a1d @ r @ a2)
    )
    return TwoModeDensityMatrix(rho.cutoff1, rho.cutoff2, out)


def superoperator(cutoff1: int, cutoff2: int,
                  c: GainCoefficients) -> sps.csr_matrix:
    """Sparse Liouvillian on vec(rho) (row-major); same action as
    liouvillian_apply."""
    a1, a2 = _mode_ops(cutoff1, cutoff2)
    a1d, a2d = a1.conj().T.tocsr(), a2.conj().T.tocsr()
    d = cutoff1 * cutoff2
    Id = sps.identity(d, format="csr", dtype=complex)

    def left(X):                 # X rho
        return sps.kron(X, Id, format="csr")

    def right(X):                # rho X
        return sps.kron(Id, X.T, format="csr")

    def both(X, Y):              # X rho Y
        return sps.kron(X, Y.T, format="csr")

    al1, al2, al12, al21 = c.alpha1, c.alpha2, c.alpha12, c.alpha21
    ac1, ac2, ac12, ac21 = (np.conj(al1), np.conj(al2),
                            np.conj(al12), np.conj(al21))
    k1, k2 = c.kappa1, c.kappa2
    L = (
        -k1 * (left(a1d @ a1) + right(a1d @ a1) - 2 * both(a1, a1d))
        - k2 * (left(a2d @ a2) + right(a2d @ a2) - 2 * both(a2, a2d))
        - al1 * right(a1 @ a1d) - ac1 * left(a1 @ a1d)
        + (al1 + ac1) * both(a1d, a1)
        - al2 * right(a2 @ a2d) - ac2 * left(a2 @ a2d)
        + (al2 + ac2) * both(a2d, a2)
        - al12 * right(a2 @ a1d) + al12 * both(a1d, a2)
        - ac12 * left(a1 @ a2d) + ac12 * both(a2d, a1)
        - al21 * right(a1 @ a2d) + al21 * both(a2d, a1)
        - ac21 * left(a2 @ a1d) + ac21 * both(a1d, a2)
    )
    return L.tocsr()


@lru_cache(maxsize=8)
def _moment_ops(cutoff1: int, cutoff2: int):
    """The 13 observables in the printed operator orderings, sparse."""
    a1, a2 = _mode_ops(cutoff1, cutoff2)
    a1d, a2d = a1.conj().T.tocsr(), a2.conj().T.tocsr()
    ops = {
        "n1": a1d @ a1, "n2": a2d @ a2,
        "m12": a1 @ a2d, "m21": a2 @ a1d,
        "q1": a1 @ a1d @ a1 @ a1d, "q2": a2 @ a2d @ a2 @ a2d,
        "nn": a1d @ a1 @ a2d @ a2,
        "t1": a2d @ a2 @ a2d @ a1, "t2": a1d @ a1 @ a1d @ a2,
        "t1c": a1d @ a2 @ a2d @ a2, "t2c": a2d @ a1 @ a1d @ a1,
        "s": a2 @ a2 @ a1d @ a1d, "sc": a1 @ a1 @ a2d @ a2d,
    }
    return {k: v.tocsr() for k, v in ops.items()}


def moments_from_density(rho: TwoModeDensityMatrix) -> MomentState:
    """Tr(O rho) for the 13 tracked operator orderings."""
    ops = _moment_ops(rho.cutoff1, rho.cutoff2)
    m = np.zeros(13, complex)
    rt = rho.rho.T
    for k, O in ops.items():
        # Tr(O rho) = sum_ij O_ij rho_ji
        m[IX[k]] = O.multiply(rt).sum()
    return MomentState(m)


def evolve_density(rho0: TwoModeDensityMatrix, c: GainCoefficients,
                   t_max: float, dt: float = 1e-4, stride: int = 100):
    """RK4 trajectory of vec(rho) under the sparse Liouvillian.

    Returns [(t, TwoModeDensityMatrix), ...] sampled every `stride` steps
    (plus the final step).  A second state advanced at dt/2 runs in
    lockstep; the two are compared at every emitted sample (tightening the
    compare-at-t_max contract so that a TruncationLeak still leaves a
    verified partial series), and NonConverged is raised past 1e-8
    relative disagreement.  The boundary-population monitor runs at every
    sample; crossing 1e-6 raises TruncationLeak carrying the trusted
    series so far.
    """
    from .moments import NonConverged

    if dt <= 0 or t_max < 0:
        raise ValueError("need dt > 0 and t_max >= 0")
    c1, c2 = rho0.cutoff1, rho0.cutoff2
    L = superoperator(c1, c2, c)
    n_steps = int(np.ceil(t_max / dt - 1e-12)) if t_max > 0 else 0

    def rk4(v, h):
        k1 = L @ v
        k2 = L @ (v + 0.5 * h * k1)
        k3 = L @ (v + 0.5 * h * k2)
        k4 = L @ (v + h * k3)
        return v + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)

    v = rho0.rho.reshape(-1).copy()
    vh = v.copy()
    series = []

    def emit(step, v, vh):
        t = step * dt
        num = np.max(np.abs(v - vh))
        den = max(1.0, np.max(np.abs(v)), np.max(np.abs(vh)))
        if num / den > 1e-8:
            raise NonConverged(
                f"step-halving disagreement {num / den:.3e} at t = {t:g}")
        snap = TwoModeDensityMatrix(c1, c2, v.reshape(c1 * c2, c1 * c2).copy())
        leak = snap.boundary_population()
        if leak > 1e-6:
            raise TruncationLeak(
                f"boundary population {leak:.3e} at t = {t:g}",
                series=series, t_leak=t, leak=leak)
        series.append((t, snap))

    emit(0, v, vh)
    for step in range(1, n_steps + 1):
        v = rk4(v, dt)
        vh = rk4(rk4(vh, dt / 2), dt / 2)
        if step % stride == 0 or step == n_steps:
            emit(step, v, vh)
    return series
