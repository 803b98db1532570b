"""Random-matrix numerical oracle.

Wishart matrices W = (1/d) G G^T with G a d x n standard Gaussian matrix
and n = round(lambda*d) have normalized-trace moments converging to the
free Poisson(lambda, 1) moments, and independent Haar-orthogonal
conjugation makes ensembles asymptotically free.  That is enough to
check every distributional statement of the exact modules against
finite-dimensional matrices: step integrals become sums of independently
rotated Wisharts, positivity and trace-norm contraction become
eigenvalue statements.

Reproducibility: every Gaussian draw comes from a Philox stream keyed by
SeedSequence(entropy=seed, spawn_key=(stream, piece, draw)), where
stream 0 feeds Wishart factors and stream 1 feeds Haar rotations, and
Gaussians are produced by an explicit Box-Muller transform so one
implementation yields bitwise-identical samples for identical configs.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .cumulants import MomentSequence, cumulants_to_moments
from .integration import PiecewisePoly, StepFunction, approximate, integrate_step

WISHART_STREAM = 0
HAAR_STREAM = 1


@dataclass(frozen=True)
class EnsembleConfig:
    """Matrix dimension, base seed, and number of draws for averaging."""

    d: int
    seed: int
    samples: int = 1

    def __post_init__(self):
        if not isinstance(self.d, int) or isinstance(self.d, bool) or self.d < 2:
            raise ValueError("dimension d must be an integer >= 2")
        if not isinstance(self.seed, int) or isinstance(self.seed, bool) or not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        if not isinstance(self.samples, int) or isinstance(self.samples, bool) or self.samples < 1:
            raise ValueError("samples must be a positive integer")


@dataclass(eq=False)
class MatrixSample:
    """Real symmetric d x d matrix with finite double-precision entries."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError("matrix must be square")
        if not np.all(np.isfinite(m)):
            raise ValueError("matrix entries must be finite")
        if m.size and float(np.max(np.abs(m - m.T))) > 1e-12:
            raise ValueError("matrix must be symmetric within 1e-12")
        self.matrix = m

    @property
    def d(self) -> int:
        return self.matrix.shape[0]


def _rng(cfg: EnsembleConfig, stream: int, piece: int, draw: int) -> np.random.Generator:
    seq = np.random.SeedSequence(entropy=cfg.seed, spawn_key=(stream, piece, draw))
    return np.random.Generator(np.random.Philox(seq))


def _gaussian(rng: np.random.Generator, rows: int, cols: int) -> np.ndarray:
    """Standard normals via Box-Muller on counted uniform draws."""
    n = rows * cols
    m = (n + 1) // 2
    u1 = 1.0 - rng.random(m)  # in (0, 1]: log is finite
    u2 = rng.random(m)
    r = np.sqrt(-2.0 * np.log(u1))
    z = np.concatenate([r * np.cos(2.0 * math.pi * u2), r * np.sin(2.0 * math.pi * u2)])
    return z[:n].reshape(rows, cols)


def _symmetrize(m: np.ndarray) -> np.ndarray:
    return (m + m.T) / 2.0


def sample_free_poisson(
    cfg: EnsembleConfig, lam, *, piece: int = 0, draw: int = 0
) -> MatrixSample:
    """W = (1/d) G G^T with G of shape d x round(lam*d): free Poisson(lam, 1).

    W is positive semidefinite by construction; its free cumulants all
    converge to lam as d grows.
    """
    if not lam > 0:
        raise ValueError("lambda must be positive")
    n = int(round(lam * cfg.d))
    if n < 1:
        raise ValueError(f"lambda={lam} gives an empty Gaussian factor at d={cfg.d}")
    g = _gaussian(_rng(cfg, WISHART_STREAM, piece, draw), cfg.d, n)
    return MatrixSample(_symmetrize(g @ g.T / cfg.d))


def haar_conjugate(
    m: MatrixSample, cfg: EnsembleConfig, *, piece: int = 0, draw: int = 0
) -> MatrixSample:
    """U m U^T with U exactly Haar on the orthogonal group.

    U comes from the QR decomposition of a square Gaussian matrix with
    the R-diagonal sign correction; the spectrum of m is preserved.
    """
    z = _gaussian(_rng(cfg, HAAR_STREAM, piece, draw), m.d, m.d)
    q, r = np.linalg.qr(z)
    signs = np.sign(np.diag(r))
    signs[signs == 0] = 1.0
    q = q * signs
    return MatrixSample(_symmetrize(q @ m.matrix @ q.T))


def empirical_moments(m: MatrixSample, order: int) -> MomentSequence:
    """m_k = tr(m^k)/d via matrix powers up to ceil(order/2) and trace products."""
    if order < 1:
        raise ValueError("order must be at least 1")
    half = (order + 1) // 2
    powers = [m.matrix]
    for _ in range(half - 1):
        powers.append(powers[-1] @ m.matrix)
    values = []
    for k in range(1, order + 1):
        i = k // 2
        if k % 2 == 0:
            v = float(np.sum(powers[i - 1] * powers[i - 1]))
        elif k == 1:
            v = float(np.trace(powers[0]))
        else:
            v = float(np.sum(powers[i - 1] * powers[i]))
        values.append(v / m.d)
    return MomentSequence(order, tuple(values), "float")


def simulate_step_integral(
    s: StepFunction, cfg: EnsembleConfig, *, draw: int = 0
) -> MatrixSample:
    """X(s) = sum_i c_i U_i W_i U_i^T with independent streams per piece.

    Each piece E_i contributes a Wishart realizing free Poisson(|E_i|, 1)
    (so kappa_n = |E_i| at every order), independently Haar-rotated to
    make the pieces asymptotically free.
    """
    acc = np.zeros((cfg.d, cfg.d))
    for i, (iv, c) in enumerate(s.pieces):
        w = sample_free_poisson(cfg, float(iv.measure), piece=i, draw=draw)
        w = haar_conjugate(w, cfg, piece=i, draw=draw)
        acc += float(c) * w.matrix
    return MatrixSample(acc)


def averaged_step_moments(s: StepFunction, cfg: EnsembleConfig, order: int) -> MomentSequence:
    """Mean empirical moments over cfg.samples independent draws, fixed order."""
    acc = np.zeros(order)
    for draw in range(cfg.samples):
        sample = simulate_step_integral(s, cfg, draw=draw)
        acc += np.asarray(empirical_moments(sample, order).values)
    return MomentSequence(order, tuple(float(v) for v in acc / cfg.samples), "float")


def step_integral_report(s: StepFunction, cfg: EnsembleConfig, order: int) -> dict:
    """Predicted vs empirical moments of X(s): the simulation-facing summary."""
    predicted = cumulants_to_moments(integrate_step(s, order))
    empirical = averaged_step_moments(s, cfg, order)
    pred = [float(v) for v in predicted.values]
    emp = list(empirical.values)
    return {
        "d": cfg.d,
        "seed": cfg.seed,
        "samples": cfg.samples,
        "order": order,
        "predicted": pred,
        "empirical": emp,
        "abs_error": [abs(a - b) for a, b in zip(pred, emp)],
    }


def _pointwise_leq(f: PiecewisePoly, g: PiecewisePoly, points: int) -> bool:
    """Sample f <= g on a uniform grid plus all piece breakpoints."""
    cuts = sorted({
        float(x) for fn in (f, g) for iv, _ in fn.pieces for x in (iv.lo, iv.hi)
    })
    if not cuts:
        return True
    xs = np.linspace(cuts[0], cuts[-1], points).tolist() + cuts[:-1]
    return all(f(x) <= g(x) + 1e-12 for x in xs)


def check_positivity_order(
    f: PiecewisePoly, g: PiecewisePoly, cfg: EnsembleConfig, *,
    mesh=None, check_points: int = 257,
) -> float:
    """Minimum eigenvalue of the simulated X(g - f); f <= g makes it >= -eps.

    The step approximation of g - f >= 0 has non-negative coefficients
    (per-cell infima), and Wisharts are positive semidefinite, so the sum
    is too; the returned minimum eigenvalue is 0 up to floating error.
    """
    if not _pointwise_leq(f, g, check_points):
        raise ValueError("f must be <= g pointwise")
    diff = g.sub(f)
    if not diff.pieces:
        return 0.0
    if mesh is None:
        lo, hi = diff.support_bounds()
        mesh = (float(hi) - float(lo)) / 64
    sample = simulate_step_integral(approximate(diff, mesh), cfg)
    if not sample.matrix.any():
        return 0.0
    return float(np.linalg.eigvalsh(sample.matrix)[0])


def check_l1_contraction(
    f: PiecewisePoly, cfg: EnsembleConfig, *, mesh=None, centered: bool = False
) -> tuple:
    """(tr|X(f)|/d, ||f||_1), or the centered variant (tr|X(f) - (int f) I|/d, 2||f||_1).

    The trace norm of the simulated integral never exceeds the L1 norm
    of the integrand (up to finite-d error): integration against the
    random measure is an L1 contraction, and centering at most doubles
    the bound.
    """
    rhs = float(f.l1_norm())
    if not f.pieces:
        return 0.0, 0.0
    if mesh is None:
        lo, hi = f.support_bounds()
        mesh = (float(hi) - float(lo)) / 64
    s = approximate(f, mesh)
    sample = simulate_step_integral(s, cfg)
    matrix = sample.matrix
    if centered:
        matrix = matrix - float(s.integral()) * np.eye(cfg.d)
        rhs = 2.0 * rhs
    lhs = float(np.sum(np.abs(np.linalg.eigvalsh(matrix)))) / cfg.d
    return lhs, rhs
