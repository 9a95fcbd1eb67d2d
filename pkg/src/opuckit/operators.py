"""Weighted Riesz projections, the commutator-difference operator Q_{w,p},
and induced L^p operator-norm estimation.

All operators act on grid functions in the *unweighted* L^p(T); the weight
enters through conjugation, e.g. T_w f = w^{1/p} P^+ (w^{-1/p} f).  For
p = 2 norms are exact largest singular values of materialized matrices
(band-restricted inputs, or the full node basis on small grids); for
p != 2 the dual-norm power iteration reports certified lower bounds with
trial metadata.
"""

from dataclasses import dataclass

import numpy as np

from .fits import fit_loglog
from .grid import CircleGrid, GridFunction, band_project, riesz_project
from .weights import Weight


@dataclass
class OperatorProbe:
    grid: CircleGrid
    apply: callable                 # values -> values
    adjoint: callable               # adjoint w.r.t. the unweighted L^2 pairing
    band: int | None
    p: float
    description: str

    def check_linearity(self, seed: int = 0, tol: float = 1e-10) -> bool:
        rng = np.random.default_rng(seed)
        n = self.grid.size
        f = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        g = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        a, b = 0.7 - 0.3j, -1.2 + 0.4j
        lhs = self.apply(a * f + b * g)
        rhs = a * self.apply(f) + b * self.apply(g)
        scale = max(np.max(np.abs(lhs)), 1.0)
        return bool(np.max(np.abs(lhs - rhs)) < tol * scale)


@dataclass(frozen=True)
class NormEstimate:
    value: float
    method: str                     # exact_svd_p2 | power_method_p | random_probe
    trials: int
    seed: int
    converged: bool = True

    def __post_init__(self):
        if self.method == "exact_svd_p2" and self.value < 0:
            raise ValueError("singular values are nonnegative")


def _riesz_values(grid: CircleGrid, values: np.ndarray) -> np.ndarray:
    return riesz_project(GridFunction(grid, values)).values


def _band_values(grid: CircleGrid, values: np.ndarray, lo: int, hi: int) -> np.ndarray:
    return band_project(GridFunction(grid, values), lo, hi).values


def weighted_riesz(w: Weight, p: float, band: int | None = None) -> OperatorProbe:
    """f -> w^{1/p} P^+ (w^{-1/p} f) on grid functions."""
    if p <= 1.0:
        raise ValueError("p > 1 required")
    grid = w.grid
    u = w.values ** (1.0 / p)

    def apply(x):
        return u * _riesz_values(grid, x / u)

    def adjoint(x):
        return (1.0 / u) * _riesz_values(grid, u * x)

    return OperatorProbe(grid, apply, adjoint, band, p,
                         f"w^(1/p) P+ w^(-1/p), p={p}, family={w.family}")


def probe_difference(a: OperatorProbe, b: OperatorProbe) -> OperatorProbe:
    if a.grid.log2_size != b.grid.log2_size:
        raise ValueError("probes live on different grids")
    return OperatorProbe(
        a.grid,
        lambda x: a.apply(x) - b.apply(x),
        lambda x: a.adjoint(x) - b.adjoint(x),
        a.band if a.band is not None else b.band,
        a.p,
        f"({a.description}) - ({b.description})",
    )


def build_Q(w: Weight, p: float, n: int) -> OperatorProbe:
    """Q_{w,p} = -w^{-1/p'} P_{n-1} w^{1/p'} + w^{1/p} P_{n-1} w^{-1/p},

    with P_{n-1} the band truncation to frequencies 0..n-1.  Antisymmetric
    at p = 2; satisfies zeta_n = w^{1/p} z^n + Q zeta_n for zeta_n = w^{1/p} Phi_n.
    """
    if p <= 1.0:
        raise ValueError("p > 1 required")
    grid = w.grid
    if n >= grid.size // 4:
        raise ValueError("band cap n must stay below N/4")
    q = p / (p - 1.0)
    u = w.values ** (1.0 / p)        # w^{1/p}
    v = w.values ** (1.0 / q)        # w^{1/p'}
    hi = n - 1

    def apply(x):
        return -(_band_values(grid, v * x, 0, hi)) / v + u * _band_values(grid, x / u, 0, hi)

    def adjoint(x):
        return -v * _band_values(grid, x / v, 0, hi) + _band_values(grid, u * x, 0, hi) / u

    return OperatorProbe(grid, apply, adjoint, 2 * n, p,
                         f"Q_(w,p) with band {n}, p={p}, family={w.family}")


def materialize_band(probe: OperatorProbe, band: int) -> np.ndarray:
    """Matrix of the probe restricted to inputs e^{ik theta}, |k| <= band.

    Columns are scaled by 1/sqrt(N) so singular values equal operator norms
    between the discrete L^2 spaces.
    """
    grid = probe.grid
    if band >= grid.size // 2:
        raise ValueError("band exceeds the grid Nyquist range")
    ks = np.arange(-band, band + 1)
    cols = np.empty((grid.size, len(ks)), dtype=complex)
    for i, k in enumerate(ks):
        cols[:, i] = probe.apply(np.exp(1j * k * grid.nodes))
    return cols / np.sqrt(grid.size)


def compress_band(probe: OperatorProbe, band: int) -> np.ndarray:
    """Square compression <T e_b, e_a> for |a|, |b| <= band (discrete L^2 pairing)."""
    grid = probe.grid
    ks = np.arange(-band, band + 1)
    mat = np.empty((len(ks), len(ks)), dtype=complex)
    for i, k in enumerate(ks):
        coeffs = grid.analyze(probe.apply(np.exp(1j * k * grid.nodes)))
        mat[:, i] = coeffs[ks]
    return mat


def materialize_full(probe: OperatorProbe) -> np.ndarray:
    grid = probe.grid
    if grid.size > 1024:
        raise ValueError("full materialization is restricted to N <= 2^10")
    eye = np.eye(grid.size, dtype=complex)
    return np.column_stack([probe.apply(eye[:, j]) for j in range(grid.size)])


def _lp_norm(values: np.ndarray, p: float) -> float:
    m = float(np.max(np.abs(values)))
    if m == 0.0:
        return 0.0
    return m * float(np.mean((np.abs(values) / m) ** p)) ** (1.0 / p)


def _dual_sign(y: np.ndarray, p: float) -> np.ndarray:
    ay = np.abs(y)
    m = ay.max()
    if m == 0.0:
        return np.zeros_like(y)
    unit = np.where(ay > 0, y, 0.0) / np.where(ay > 0, ay, 1.0)
    return (ay / m) ** (p - 1.0) * unit


def power_method_lp(probe: OperatorProbe, p: float, x0: np.ndarray,
                    max_iters: int = 100, tol: float = 1e-11) -> tuple:
    """Boyd's dual-norm iteration; the ratio ||Tx||_p / ||x||_p is monotone
    non-decreasing, so the final value is a certified lower bound."""
    q = p / (p - 1.0)
    x = x0 / _lp_norm(x0, p)
    best = 0.0
    for it in range(max_iters):
        y = probe.apply(x)
        r = _lp_norm(y, p)
        if r <= best * (1.0 + tol):
            return max(best, r), True, it
        best = r
        z = probe.adjoint(_dual_sign(y, p))
        x_new = _dual_sign(z, q)
        nx = _lp_norm(x_new, p)
        if nx == 0.0:
            return best, True, it
        x = x_new / nx
    return best, False, max_iters


def operator_norm(probe: OperatorProbe, method: str = "auto", trials: int = 8,
                  seed: int = 0) -> NormEstimate:
    """Induced L^p -> L^p norm estimate.

    p = 2: exact largest singular value (full node-basis matrix for
    N <= 2^10, else the band restriction from probe.band).  p != 2:
    dual-norm power method over `trials` random starts, reported as a
    lower bound; non-convergence returns best-so-far flagged.
    """
    grid = probe.grid
    p = probe.p
    if method == "auto":
        method = "exact_svd_p2" if p == 2.0 else "power_method_p"

    if method == "exact_svd_p2":
        if p != 2.0:
            raise ValueError("exact SVD applies at p = 2 only")
        if grid.size <= 1024 and probe.band is None:
            mat = materialize_full(probe)
        else:
            band = probe.band
            if band is None:
                raise ValueError("probe needs a band for exact p=2 norms on large grids")
            mat = materialize_band(probe, band)
        value = float(np.linalg.svd(mat, compute_uv=False)[0])
        return NormEstimate(value, "exact_svd_p2", trials=0, seed=seed)

    rng = np.random.default_rng(seed)
    best = 0.0
    all_converged = True
    for _ in range(max(trials, 1)):
        if probe.band is not None:
            ks = np.arange(-probe.band, probe.band + 1)
            coeffs = np.zeros(grid.size, dtype=complex)
            coeffs[ks] = rng.standard_normal(len(ks)) + 1j * rng.standard_normal(len(ks))
            x0 = grid.synthesize(coeffs)
        else:
            x0 = rng.standard_normal(grid.size) + 1j * rng.standard_normal(grid.size)
        if method == "random_probe":
            best = max(best, _lp_norm(probe.apply(x0), p) / _lp_norm(x0, p))
            continue
        val, conv, _ = power_method_lp(probe, p, x0)
        best = max(best, val)
        all_converged = all_converged and conv
    return NormEstimate(best, method, trials=trials, seed=seed, converged=all_converged)


# ---------------------------------------------------------------------------
# weight-continuity experiment
# ---------------------------------------------------------------------------

def perturbed_weight(w: Weight, f_values: np.ndarray, delta: float) -> Weight:
    scaled = delta * np.asarray(f_values)
    if np.max(scaled) > 300.0 or np.min(scaled) < -300.0:
        raise ValueError("exp(delta f) overflows or underflows; shrink delta or f")
    vals = w.values * np.exp(scaled)
    return Weight(GridFunction(w.grid, vals), normalized=False, family="perturbed",
                  params={"base": w.family, "delta": delta})


def continuity_experiment(w: Weight, f: GridFunction, p: float, deltas,
                          seed: int = 0, band: int = 64, trials: int = 6) -> dict:
    """Distances d(delta) = ||T(w e^{delta f}) - T(w)||_{p,p} and the log-log slope.

    Exact band-restricted norms at p = 2, power-method lower bounds otherwise.
    Rows are (delta, distance); the caller wraps them into experiment records.
    """
    deltas = np.asarray(sorted(deltas, reverse=True), dtype=float)
    if np.any(deltas <= 0):
        raise ValueError("deltas must be positive")
    fv = f.real_values()
    base = weighted_riesz(w, p, band=band)
    rows = []
    for delta in deltas:
        wd = perturbed_weight(w, fv, delta)
        diff = probe_difference(weighted_riesz(wd, p, band=band), base)
        est = operator_norm(diff, method="auto", trials=trials, seed=seed)
        rows.append((float(delta), est.value))
    d = np.array([r[1] for r in rows])
    if np.all(d > 0):
        slope, intercept, r2 = fit_loglog(deltas, d)
    else:
        slope, intercept, r2 = float("nan"), float("nan"), float("nan")
    return {"rows": rows, "slope": slope, "intercept": intercept, "r2": r2,
            "p": p, "band": band, "seed": seed}
