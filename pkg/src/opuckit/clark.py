"""Caratheodory boundary data, Schur functions, and Aleksandrov-Clark weights.

For a normalized weight the boundary Caratheodory trace is F = w + i H(w)
(so F(0) = 1 and Re F = w), the Schur function is

    f(xi) = (F(xi) - 1) / (xi (F(xi) + 1)),

and the Clark family comes from the Moebius map F_a = (zeta + F)/(1 + zeta F)
with zeta = (1-a)/(1+a) purely imaginary for unimodular a.  The dual case
a = -1 degenerates to F_{-1} = 1/F, i.e. w_dual = w/(w^2 + H(w)^2).
"""

import warnings
from dataclasses import dataclass, field

import numpy as np

from .grid import GridFunction, conjugate_function, mean
from .weights import ArcFamily, Weight, ap_characteristic

DENOM_FLOOR = 1e-280
DEGENERACY_FRACTION = 1e-4  # guarded divisions allowed on at most this node fraction


class DegenerateInputError(ValueError):
    pass


@dataclass
class ClarkData:
    alpha: complex
    F_boundary: GridFunction = field(repr=False)
    f_boundary: GridFunction = field(repr=False)
    w_alpha: Weight
    mass: float  # quadrature(w_alpha)/2pi, a probability/absolute-continuity diagnostic


def caratheodory_boundary(w: Weight) -> GridFunction:
    """F = w + i H(w) on the boundary; H kills constants so mean(Im F) = 0."""
    if not w.normalized:
        raise ValueError("caratheodory_boundary requires a normalized weight")
    wt = conjugate_function(w.samples)
    return GridFunction(w.grid, w.values + 1j * wt.values)


def schur_from_caratheodory(F: GridFunction) -> GridFunction:
    """Pointwise boundary Schur function f = (F - 1)/(xi (F + 1))."""
    if np.min(F.values.real) <= 0.0:
        warnings.warn("Re F is not strictly positive on the grid", stacklevel=2)
    denom = F.values + 1.0
    if np.min(np.abs(denom)) < DENOM_FLOOR:
        raise DegenerateInputError("F + 1 vanishes on the grid")
    return GridFunction(F.grid, (F.values - 1.0) / (F.grid.points * denom))


def _moebius_clark(F_vals: np.ndarray, alpha: complex) -> np.ndarray:
    zeta = (1.0 - alpha) / (1.0 + alpha)
    return (zeta + F_vals) / (1.0 + zeta * F_vals)


def clark_weight(w: Weight, alpha: complex, check_a2: bool = True) -> ClarkData:
    """Aleksandrov-Clark weight w_alpha = Re F_alpha on the boundary.

    For alpha = -1 the direct dual formula w/(w^2 + H(w)^2) is used (the
    Moebius form has zeta = infinity there).  The mass diagnostic should be
    1 for weights in A_2 where mu_alpha stays absolutely continuous; its
    distance from 1 measures the discretization of any near-singular peak.
    """
    if abs(abs(alpha) - 1.0) > 1e-12:
        raise ValueError(f"alpha must be unimodular, got |alpha| = {abs(alpha)}")
    if check_a2:
        rep = ap_characteristic(w, 2.0, ArcFamily(w.grid))
        if not np.isfinite(rep.value):
            raise ValueError("weight is not A_2 at working precision")

    F = caratheodory_boundary(w)
    f = schur_from_caratheodory(F)
    if np.max(np.abs(f.values)) > 1.0 + 1e-8:
        warnings.warn("Schur function exceeds modulus 1 beyond tolerance", stacklevel=2)

    if abs(alpha + 1.0) <= 1e-12:
        wt = F.values.imag
        denom = w.values ** 2 + wt ** 2
        n_guarded = int(np.sum(denom < DENOM_FLOOR))
        if n_guarded > DEGENERACY_FRACTION * w.grid.size:
            raise DegenerateInputError(
                f"|F|^2 below floor at {n_guarded} nodes; dual weight degenerate")
        vals = w.values / np.maximum(denom, DENOM_FLOOR)
    else:
        vals = _moebius_clark(F.values, complex(alpha)).real
        if np.any(vals <= 0.0):
            raise DegenerateInputError("Clark weight lost positivity on the grid")

    wf = GridFunction(w.grid, vals)
    mass = float(mean(wf))
    w_alpha = Weight(wf, normalized=abs(mass - 1.0) <= 1e-12, family="user",
                     params={"values": vals, "clark_alpha": complex(alpha),
                             "clark_base": w.family})
    return ClarkData(alpha=complex(alpha), F_boundary=F, f_boundary=f,
                     w_alpha=w_alpha, mass=mass)


def generalized_entropy(w: Weight, z_samples) -> np.ndarray:
    """K(mu, z) = log P(w, z) - P(log w, z) at each sample point.

    The Poisson values use exact probability weights at every z (normalized
    discrete kernel), so K >= 0 holds to roundoff by Jensen.
    """
    z_samples = np.asarray(z_samples, dtype=complex).ravel()
    if np.any(np.abs(z_samples) >= 1.0):
        raise ValueError("all sample points must lie strictly inside the disk")
    grid = w.grid
    logw = np.log(w.values)
    out = np.empty(len(z_samples))
    for i, z in enumerate(z_samples):
        kern = (1.0 - abs(z) ** 2) / np.abs(1.0 - np.conj(grid.points) * z) ** 2
        lam = kern / kern.sum()
        out[i] = np.log(float(lam @ w.values)) - float(lam @ logw)
    return out
