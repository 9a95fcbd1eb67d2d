"""Szego recursion, Verblunsky coefficients, CD kernels, and finite projections.

The recursion is driven by moments, not samples: with monic polynomials
Phi_n and reversed polynomials Phi_n^* = z^n conj(Phi_n(1/conj(z))),

    Phi_{n+1}(z) = z Phi_n(z) - conj(alpha_n) Phi_n^*(z),
    conj(alpha_n) = <z Phi_n, 1> / E_n,      E_{n+1} = (1 - |alpha_n|^2) E_n,

where E_n = ||Phi_n||^2 and <f, g> = int f conj(g) dmu.  This is the
Levinson-Durbin recursion on the Toeplitz moment matrix; each step costs
one O(n) dot product, so the whole table is O(nmax^2).

Because the moments come from grid samples, the polynomials are exactly
orthonormal for the discrete node measure, and every quadrature inner
product below inherits that exactness for degrees < N/2.
"""

from dataclasses import dataclass, field

import numpy as np

from .grid import CircleGrid, GridFunction, MomentSequence
from .weights import Weight


class RecursionBreakdownError(RuntimeError):
    """Loss of positive definiteness in the moment data (1 - |alpha_n|^2 <= 1e-13)."""

    def __init__(self, index: int, alpha: complex):
        self.index = index
        self.alpha = alpha
        super().__init__(
            f"Szego recursion broke down at step {index}: |alpha| = {abs(alpha):.17g}; "
            "the input is not a weight's moment sequence or is catastrophically conditioned"
        )


POSITIVITY_FLOOR = 1e-13


@dataclass
class OPUCSystem:
    """Verblunsky coefficients plus the monic coefficient table.

    monic[n, :n+1] holds the coefficients of Phi_n (degree-n monic);
    kappa[n] = coeff_n(phi_n) = E_n^{-1/2} is the orthonormal leading
    coefficient, non-decreasing in n once c_0 <= 1.
    """

    nmax: int
    verblunsky: np.ndarray
    monic: np.ndarray = field(repr=False)
    norms_sq: np.ndarray = field(repr=False)  # E_n = ||Phi_n||^2, n = 0..nmax
    moments: MomentSequence = field(repr=False)
    weight: Weight | None = field(default=None, repr=False)

    @property
    def kappa(self) -> np.ndarray:
        return 1.0 / np.sqrt(self.norms_sq)

    def monic_coeffs(self, n: int) -> np.ndarray:
        self._check_degree(n)
        return self.monic[n, : n + 1]

    def orthonormal_coeffs(self, n: int) -> np.ndarray:
        self._check_degree(n)
        return self.monic[n, : n + 1] / np.sqrt(self.norms_sq[n])

    def orthonormal_table(self, n: int) -> np.ndarray:
        """Rows k = 0..n: coefficients of phi_k, zero padded to length n+1."""
        self._check_degree(n)
        return self.monic[: n + 1, : n + 1] / np.sqrt(self.norms_sq[: n + 1, None])

    def _check_degree(self, n: int):
        if not 0 <= n <= self.nmax:
            raise ValueError(f"degree {n} out of range [0, {self.nmax}]")


def szego_recursion(moments: MomentSequence, nmax: int, weight: Weight | None = None) -> OPUCSystem:
    """Run the moment-driven recursion up to degree nmax (needs kmax >= nmax)."""
    if nmax < 0:
        raise ValueError("nmax must be nonnegative")
    if moments.kmax < nmax:
        raise ValueError(f"need moments up to order {nmax}, have kmax = {moments.kmax}")

    c = moments.c
    cc = np.conj(c)
    monic = np.zeros((nmax + 1, nmax + 1), dtype=complex)
    monic[0, 0] = 1.0
    alphas = np.zeros(nmax, dtype=complex)
    norms_sq = np.zeros(nmax + 1)
    norms_sq[0] = c[0].real

    for n in range(nmax):
        b = monic[n, : n + 1]
        # <z Phi_n, 1> = sum_j b_j conj(c_{j+1})
        abar = np.dot(b, cc[1: n + 2]) / norms_sq[n]
        gap = 1.0 - abs(abar) ** 2
        if gap <= POSITIVITY_FLOOR:
            raise RecursionBreakdownError(n, np.conj(abar))
        alphas[n] = np.conj(abar)
        monic[n + 1, 1: n + 2] = b
        monic[n + 1, : n + 1] -= abar * np.conj(b[::-1])
        norms_sq[n + 1] = norms_sq[n] * gap

    return OPUCSystem(nmax=nmax, verblunsky=alphas, monic=monic,
                      norms_sq=norms_sq, moments=moments, weight=weight)


def system_from_weight(w: Weight, nmax: int) -> OPUCSystem:
    return szego_recursion(w.moments(nmax), nmax, weight=w)


def gram_schmidt_monic(moments: MomentSequence, nmax: int) -> np.ndarray:
    """Brute-force monic coefficients from the Toeplitz Gram matrix.

    Independent of the recursion: solves <Phi_n, z^k> = 0, k < n, directly.
    Oracle for small n.
    """
    out = np.zeros((nmax + 1, nmax + 1), dtype=complex)
    out[0, 0] = 1.0
    for n in range(1, nmax + 1):
        g = moments.toeplitz_gram(n)
        # coefficients b with sum_j G[k, j] b_j = 0 for k < n, b_n = 1
        rhs = -g[:n, n]
        out[n, :n] = np.linalg.solve(g[:n, :n], rhs)
        out[n, n] = 1.0
    return out


def reversed_poly(coeffs: np.ndarray, n: int | None = None) -> np.ndarray:
    """Q*(z) = z^n conj(Q(1/conj(z))): conjugate and reverse, padding to degree n."""
    coeffs = np.asarray(coeffs, dtype=complex)
    deg = len(coeffs) - 1
    if n is None:
        n = deg
    if n < deg:
        raise ValueError(f"cannot reverse a degree-{deg} polynomial at degree {n}")
    padded = np.concatenate([coeffs, np.zeros(n - deg, dtype=complex)])
    return np.conj(padded[::-1])


def second_kind(system: OPUCSystem) -> OPUCSystem:
    """Second-kind system: same recursion with alpha_n -> -alpha_n.

    The resulting orthonormal polynomials psi_n are orthonormal for the dual
    measure; leading coefficients coincide with the original system's.
    """
    nmax = system.nmax
    monic = np.zeros((nmax + 1, nmax + 1), dtype=complex)
    monic[0, 0] = 1.0
    for n in range(nmax):
        b = monic[n, : n + 1]
        abar = -np.conj(system.verblunsky[n])
        monic[n + 1, 1: n + 2] = b
        monic[n + 1, : n + 1] -= abar * np.conj(b[::-1])
    return OPUCSystem(nmax=nmax, verblunsky=-system.verblunsky, monic=monic,
                      norms_sq=system.norms_sq.copy(), moments=system.moments, weight=None)


def psi_integral_form(system: OPUCSystem, w: Weight, n: int, z: complex) -> complex:
    """Quadrature of the defining integral of the second-kind polynomial,

        psi_n(z) = int (1 + z conj(xi)) / (1 - z conj(xi)) (phi_n(xi) - phi_n(z)) dmu,

    for n >= 1 and z strictly inside the disk.  Cross-check for `second_kind`.
    """
    if n < 1:
        raise ValueError("the integral form applies for n >= 1")
    if abs(z) >= 1.0:
        raise ValueError("z must lie strictly inside the disk")
    grid = w.grid
    coeffs = system.orthonormal_coeffs(n)
    phi_vals = poly_values(grid, coeffs)
    phi_at_z = poly_eval(coeffs, np.array([z]))[0]
    zeta_bar = np.conj(grid.points)
    kern = (1.0 + z * zeta_bar) / (1.0 - z * zeta_bar)
    return complex(np.sum(kern * (phi_vals - phi_at_z) * w.values) / grid.size)


# ---------------------------------------------------------------------------
# evaluation
# ---------------------------------------------------------------------------

def poly_values(grid: CircleGrid, coeffs: np.ndarray) -> np.ndarray:
    """Values of sum_m coeffs[m] z^m at the grid nodes, by padded FFT."""
    coeffs = np.asarray(coeffs, dtype=complex)
    if len(coeffs) > grid.size // 2:
        raise ValueError("polynomial degree must stay below N/2")
    full = np.zeros(grid.size, dtype=complex)
    full[: len(coeffs)] = coeffs
    return grid.synthesize(full)


def poly_eval(coeffs: np.ndarray, z: np.ndarray) -> np.ndarray:
    """Horner evaluation at arbitrary complex points (off the grid)."""
    z = np.asarray(z, dtype=complex)
    out = np.zeros_like(z)
    for c in np.asarray(coeffs, dtype=complex)[::-1]:
        out = out * z + c
    return out


def phi_values(system: OPUCSystem, grid: CircleGrid, n: int, reverse: bool = False) -> np.ndarray:
    """Grid values of phi_n (or phi_n^* with reverse=True)."""
    coeffs = system.orthonormal_coeffs(n)
    if reverse:
        coeffs = reversed_poly(coeffs, n)
    return poly_values(grid, coeffs)


def orthonormal_values_table(system: OPUCSystem, grid: CircleGrid, n: int) -> np.ndarray:
    """(n+1) x N matrix of phi_k(theta_j) values."""
    table = system.orthonormal_table(n)
    out = np.empty((n + 1, grid.size), dtype=complex)
    for k in range(n + 1):
        out[k] = poly_values(grid, table[k, : k + 1])
    return out


def gram_matrix(system: OPUCSystem, n: int, weight: Weight | None = None) -> np.ndarray:
    """Gram matrix of phi_0..phi_n under (w/2pi) dtheta by quadrature."""
    w = weight or system.weight
    if w is None:
        raise ValueError("no weight attached to the system; pass one explicitly")
    vals = orthonormal_values_table(system, w.grid, n)
    return (vals * w.values) @ np.conj(vals.T) / w.grid.size


# ---------------------------------------------------------------------------
# CD kernel and projections
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CDKernelHandle:
    system: OPUCSystem
    n: int

    def __post_init__(self):
        self.system._check_degree(self.n)


def cd_kernel(handle: CDKernelHandle, z: complex, zeta: complex) -> complex:
    """K_n(z, zeta) = sum_{k<=n} phi_k(z) conj(phi_k(zeta)); Hermitian in (z, zeta)."""
    table = handle.system.orthonormal_table(handle.n)
    pz = poly_eval_table(table, complex(z))
    pzeta = poly_eval_table(table, complex(zeta))
    return complex(np.dot(pz, np.conj(pzeta)))


def poly_eval_table(table: np.ndarray, z: complex) -> np.ndarray:
    """Evaluate every row polynomial of a triangular coefficient table at z."""
    powers = z ** np.arange(table.shape[1])
    return table @ powers


def project(system: OPUCSystem, f: GridFunction, n: int, weight: Weight | None = None) -> GridFunction:
    """Orthogonal projection onto span{phi_0..phi_n} in L^2_w, by quadrature.

    Works in coefficient space: two FFTs plus two triangular products.
    """
    w = weight or system.weight
    if w is None:
        raise ValueError("no weight attached to the system; pass one explicitly")
    system._check_degree(n)
    grid = w.grid
    table = system.orthonormal_table(n)
    h = grid.analyze(f.values * w.values)[: n + 1]
    inner = np.conj(table) @ h              # <f, phi_k>_w
    coeffs = table.T @ inner                # coefficients of the projection
    return GridFunction(grid, poly_values(grid, coeffs))


def weighted_lp_norm(f: GridFunction | np.ndarray, w: Weight, p: float) -> float:
    """((1/2pi) int |f|^p w dtheta)^{1/p}, rescaled to avoid overflow at large p."""
    if p < 1.0:
        raise ValueError("p >= 1 required")
    vals = f.values if isinstance(f, GridFunction) else np.asarray(f)
    m = float(np.max(np.abs(vals)))
    if m == 0.0:
        return 0.0
    scaled = np.abs(vals) / m
    return m * float(np.mean(scaled ** p * w.values)) ** (1.0 / p)


def _lp_dual_sign(y: np.ndarray, p: float) -> np.ndarray:
    # duality map J_p(y) = |y|^{p-1} sign(y), up to overall scale
    ay = np.abs(y)
    m = ay.max()
    if m == 0.0:
        return np.zeros_like(y)
    unit = np.where(ay > 0, y, 0.0) / np.where(ay > 0, ay, 1.0)
    return (ay / m) ** (p - 1.0) * unit


def projection_norm_probe(system: OPUCSystem, n: int, p: float, trials: int = 8,
                          seed: int = 0, power_iters: int = 40,
                          weight: Weight | None = None) -> float:
    """Lower bound for ||P^w_{[0,n]}||_{L^p_w -> L^p_w}.

    Random band-limited starts refined by the dual-norm power iteration
    (the projection is self-adjoint in the weighted pairing, so the
    adjoint step reuses the same application).
    """
    if not 1.0 < p < np.inf:
        raise ValueError("p must lie in (1, inf)")
    w = weight or system.weight
    if w is None:
        raise ValueError("no weight attached to the system; pass one explicitly")
    grid = w.grid
    rng = np.random.default_rng(seed)
    q = p / (p - 1.0)

    def apply_p(x):
        return project(system, GridFunction(grid, x), n, weight=w).values

    def ratio(x):
        nx = weighted_lp_norm(x, w, p)
        return weighted_lp_norm(apply_p(x), w, p) / nx if nx > 0 else 0.0

    best = 0.0
    for _ in range(max(trials, 1)):
        # random coefficients on frequencies -n..2n (negative indices wrap
        # into the negative-frequency FFT slots)
        lo, hi = -n, min(2 * n, grid.size // 2 - 1)
        coeffs = np.zeros(grid.size, dtype=complex)
        idx = np.arange(lo, hi + 1)
        coeffs[idx] = rng.standard_normal(len(idx)) + 1j * rng.standard_normal(len(idx))
        x = grid.synthesize(coeffs)
        best = max(best, ratio(x))

        for _ in range(power_iters):
            u = _lp_dual_sign(apply_p(x), p)
            z = apply_p(u)  # self-adjoint in <.,.>_w
            x_new = _lp_dual_sign(z, q)
            nx = weighted_lp_norm(x_new, w, p)
            if nx == 0.0:
                break
            x = x_new / nx
            r = ratio(x)
            if r <= best * (1.0 + 1e-12):
                best = max(best, r)
                break
            best = r
    return best
