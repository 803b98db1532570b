"""Free Poisson process calculus.

Stationary free-increment processes are handled through their increment
cumulants: a rate-k free Poisson process with jump size alpha has
kappa_n(X_t - X_s) = k(t-s)alpha^n, and the compound variant replaces
alpha^n by the n-th moment of a jump measure nu.  Sums of freely
independent processes become a single compound process whose jump
measure is the rate-weighted mixture of the summands' jump measures.

The second half of the module is the Karhunen-Loeve side: the covariance
kernel k(s,t) = min(s,t)alpha^2 of the centered process on [0,T] has the
explicit eigensystem

    lambda_n = alpha^2 T^2 / ((n - 1/2)^2 pi^2),
    phi_n(t) = sqrt(2/T) sin((n - 1/2) pi t / T),

and the module ships deterministic Simpson-quadrature diagnostics for
orthonormality, the eigenrelation, coefficient covariances, and the
uniform Mercer truncation error.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.integrate import simpson

from . import modes
from .cumulants import MAX_ORDER_DEFAULT, CumulantSequence
from .distributions import AtomicMeasure, MomentSequence, jump_moments
from .errors import SchemaError


@dataclass(frozen=True)
class ProcessSpec:
    """A stationary free-increment process: integer rate plus jump data.

    `jump` is either a number (free Poisson with jump size alpha) or an
    AtomicMeasure / MomentSequence (compound free Poisson with jump
    measure nu).
    """

    rate: int
    jump: object

    def __post_init__(self):
        if not isinstance(self.rate, int) or isinstance(self.rate, bool) or self.rate < 1:
            raise ValueError("rate must be a positive integer")
        if not (
            isinstance(self.jump, (AtomicMeasure, MomentSequence))
            or modes.is_exact_value(self.jump)
            or isinstance(self.jump, float)
        ):
            raise ValueError("jump must be a number, an AtomicMeasure, or a MomentSequence")

    @classmethod
    def free_poisson(cls, alpha, rate: int = 1) -> "ProcessSpec":
        return cls(rate, alpha)

    @classmethod
    def compound(cls, jump, rate: int = 1) -> "ProcessSpec":
        if not isinstance(jump, (AtomicMeasure, MomentSequence)):
            raise ValueError("compound jump must be an AtomicMeasure or a MomentSequence")
        return cls(rate, jump)

    @property
    def is_free_poisson(self) -> bool:
        return not isinstance(self.jump, (AtomicMeasure, MomentSequence))


def increment_cumulants(
    p: ProcessSpec, s, t, order: int, mode: str | None = None, *,
    max_order: int = MAX_ORDER_DEFAULT,
) -> CumulantSequence:
    """kappa_n(X_t - X_s) = rate*(t-s)*alpha^n, or rate*(t-s)*m_n(nu)."""
    if order < 1:
        raise ValueError("order must be at least 1")
    if s < 0:
        raise ValueError("times must be non-negative")
    if t <= s:
        raise ValueError("increment needs s < t")
    if mode is None:
        params = [s, t] if not p.is_free_poisson else [s, t, p.jump]
        mode = modes.infer_mode(params)
    length = modes.coerce(t, mode) - modes.coerce(s, mode)
    if p.is_free_poisson:
        a = modes.coerce(p.jump, mode)
        jump_m = tuple(a**n for n in range(1, order + 1))
    else:
        jump_m = jump_moments(p.jump, order, mode)
    return CumulantSequence(order, tuple(p.rate * length * m for m in jump_m), mode)


def _lift_jump(p: ProcessSpec) -> AtomicMeasure | MomentSequence:
    if p.is_free_poisson:
        return AtomicMeasure.point(p.jump)
    return p.jump


def sum_processes(ps) -> ProcessSpec:
    """Combine freely independent processes into one compound process.

    The total rate is the sum of the rates and the jump measure is the
    rate-weighted mixture of the summands' jump measures (a free Poisson
    summand contributes a point mass at its jump size).  If any summand
    carries only a truncated moment sequence, the mixture is returned as
    a MomentSequence truncated to the shortest available order.
    """
    ps = list(ps)
    if not ps:
        raise ValueError("need at least one process")
    total = sum(p.rate for p in ps)
    jumps = [_lift_jump(p) for p in ps]
    weights = [Fraction(p.rate, total) for p in ps]
    if all(isinstance(j, AtomicMeasure) for j in jumps):
        mode = modes.infer_mode(
            [x for j in jumps for atom in j.atoms for x in atom]
        )
        atoms = []
        for w, j in zip(weights, jumps):
            wm = modes.coerce(w, mode)
            atoms.extend((x, wm * wt) for x, wt in j.atoms)
        return ProcessSpec(total, AtomicMeasure.of(atoms))
    order = min(j.order for j in jumps if isinstance(j, MomentSequence))
    mode = modes.infer_mode(
        [x for j in jumps for x in (
            j.values if isinstance(j, MomentSequence)
            else [v for atom in j.atoms for v in atom]
        )]
    )
    mixed = []
    for n in range(1, order + 1):
        acc = modes.zero(mode)
        for w, j in zip(weights, jumps):
            acc += modes.coerce(w, mode) * jump_moments(j, n, mode)[n - 1]
        mixed.append(acc)
    return ProcessSpec(total, MomentSequence(order, tuple(mixed), mode))


def covariance_kernel(p: ProcessSpec, s, t):
    """kappa_2(X_s, X_t) = rate * min(s,t) * alpha^2 for a free Poisson process."""
    if not p.is_free_poisson:
        raise ValueError("covariance kernel requires a free Poisson process spec")
    if s < 0 or t < 0:
        raise ValueError("times must be non-negative")
    mode = modes.infer_mode([s, t, p.jump])
    a = modes.coerce(p.jump, mode)
    return p.rate * modes.coerce(min(s, t), mode) * a**2


@dataclass(frozen=True)
class KLEigenSystem:
    """Closed-form eigensystem of min(s,t)*alpha^2 on [0,T] (unit rate)."""

    T: float
    alpha: float
    count: int
    eigenvalues: tuple

    def __post_init__(self):
        if self.T <= 0:
            raise ValueError("horizon T must be positive")
        if self.count < 1:
            raise ValueError("count must be at least 1")
        if len(self.eigenvalues) != self.count:
            raise ValueError("eigenvalue list must have `count` entries")

    def phi(self, n: int, t):
        """phi_n(t) = sqrt(2/T) sin((n - 1/2) pi t / T); accepts arrays."""
        self._check_index(n)
        t = np.asarray(t, dtype=float)
        out = math.sqrt(2.0 / self.T) * np.sin((n - 0.5) * math.pi * t / self.T)
        return out if out.ndim else float(out)

    def eigenfunction(self, n: int):
        self._check_index(n)
        return lambda t: self.phi(n, t)

    @property
    def eigenfunctions(self) -> tuple:
        return tuple(self.eigenfunction(n) for n in range(1, self.count + 1))

    def kernel(self, s, t):
        """min(s,t) * alpha^2; accepts arrays broadcast against each other."""
        return self.alpha**2 * np.minimum(np.asarray(s, dtype=float), np.asarray(t, dtype=float))

    def _check_index(self, n: int) -> None:
        if not 1 <= n <= self.count:
            raise ValueError(f"eigenfunction index {n} out of range 1..{self.count}")

    def to_jsonable(self) -> dict:
        return {
            "T": self.T,
            "alpha": self.alpha,
            "eigenvalues": [float(v) for v in self.eigenvalues],
        }


def kl_eigensystem(alpha, T, count: int) -> KLEigenSystem:
    """lambda_n = alpha^2 T^2 / ((n - 1/2)^2 pi^2), n = 1..count."""
    if T <= 0:
        raise ValueError("horizon T must be positive")
    if not isinstance(count, int) or isinstance(count, bool) or count < 1:
        raise ValueError("count must be a positive integer")
    a, Tf = float(alpha), float(T)
    values = tuple(
        a * a * Tf * Tf / ((n - 0.5) ** 2 * math.pi**2) for n in range(1, count + 1)
    )
    return KLEigenSystem(Tf, a, count, values)


def mercer_truncation_error(sys: KLEigenSystem, N: int, grid: int) -> float:
    """sup over a grid x grid lattice of |kernel - rank-N Mercer partial sum|."""
    if not 0 <= N <= sys.count:
        raise ValueError(f"truncation rank N={N} must lie in 0..{sys.count}")
    if grid < 2:
        raise ValueError("grid must have at least 2 points")
    s = np.linspace(0.0, sys.T, grid)
    kernel = sys.alpha**2 * np.minimum.outer(s, s)
    if N == 0:
        return float(np.max(np.abs(kernel)))
    phi = np.stack([sys.phi(n, s) for n in range(1, N + 1)])
    lam = np.asarray(sys.eigenvalues[:N], dtype=float)
    approx = (phi * lam[:, None]).T @ phi
    return float(np.max(np.abs(kernel - approx)))


MERCER_HEADER = ("N", "error")


def mercer_table(sys: KLEigenSystem, Ns, grid: int) -> list[tuple]:
    return [(N, mercer_truncation_error(sys, N, grid)) for N in Ns]


def mercer_table_csv(rows) -> list[str]:
    lines = [",".join(MERCER_HEADER)]
    lines.extend(f"{N},{modes.encode_number(err)}" for N, err in rows)
    return lines


def _check_quad(quad_points: int) -> None:
    if quad_points < 3:
        raise ValueError("quadrature needs at least 3 points")


def eigenfunction_inner_product(sys: KLEigenSystem, i: int, j: int, quad_points: int) -> float:
    """Simpson quadrature of phi_i * phi_j over [0, T] (delta_ij in the limit)."""
    _check_quad(quad_points)
    t = np.linspace(0.0, sys.T, quad_points)
    return float(simpson(sys.phi(i, t) * sys.phi(j, t), x=t))


def _kernel_apply(sys: KLEigenSystem, n: int, t: float, quad_points: int) -> float:
    """int_0^T kernel(s,t) phi_n(s) ds, split at the kink s = t."""
    a2 = sys.alpha**2
    total = 0.0
    if t > 0.0:
        s = np.linspace(0.0, t, quad_points)
        total += a2 * float(simpson(s * sys.phi(n, s), x=s))
    if t < sys.T:
        s = np.linspace(t, sys.T, quad_points)
        total += a2 * t * float(simpson(sys.phi(n, s), x=s))
    return total


def eigenrelation_residual(
    sys: KLEigenSystem, n: int, grid: int, quad_points: int
) -> float:
    """max_t |int kernel(s,t) phi_n(s) ds - lambda_n phi_n(t)| over a uniform grid."""
    sys._check_index(n)
    _check_quad(quad_points)
    if grid < 2:
        raise ValueError("grid must have at least 2 points")
    ts = np.linspace(0.0, sys.T, grid)
    lam = sys.eigenvalues[n - 1]
    worst = 0.0
    for t in ts:
        worst = max(worst, abs(_kernel_apply(sys, n, float(t), quad_points) - lam * sys.phi(n, float(t))))
    return worst


def kl_coefficient_covariance(sys: KLEigenSystem, i: int, j: int, quad_points: int) -> float:
    """Double Simpson quadrature of kernel(s,t) phi_i(s) phi_j(t) over [0,T]^2.

    Equals delta_ij * lambda_i up to quadrature error: the outer integral
    runs over the smooth function lambda_i-ish g(t) = (K phi_i)(t) phi_j(t)
    obtained from the kink-split inner quadrature.
    """
    sys._check_index(i)
    sys._check_index(j)
    _check_quad(quad_points)
    ts = np.linspace(0.0, sys.T, quad_points)
    g = np.array([_kernel_apply(sys, i, float(t), quad_points) for t in ts])
    return float(simpson(g * sys.phi(j, ts), x=ts))


def process_to_jsonable(p: ProcessSpec) -> dict:
    """JSON form: {"rate": k, "alpha": x} or {"rate": k, "jump": {...}}."""
    if p.is_free_poisson:
        return {"rate": p.rate, "alpha": modes.encode_number(p.jump)}
    return {"rate": p.rate, "jump": p.jump.to_jsonable()}


def process_from_jsonable(data, field: str = "process") -> ProcessSpec:
    if not isinstance(data, dict):
        raise SchemaError(f"{field}: expected an object")
    rate = data.get("rate", 1)
    if not isinstance(rate, int) or isinstance(rate, bool) or rate < 1:
        raise SchemaError(f"{field}.rate: must be a positive integer")
    has_alpha = "alpha" in data
    has_jump = "jump" in data
    if has_alpha == has_jump:
        raise SchemaError(f"{field}: exactly one of 'alpha' or 'jump' is required")
    if has_alpha:
        alpha = modes.decode_number(data["alpha"], field=f"{field}.alpha")
        return ProcessSpec.free_poisson(alpha, rate)
    jump_data = data["jump"]
    if isinstance(jump_data, dict) and "atoms" in jump_data:
        jump = AtomicMeasure.from_jsonable(jump_data, field=f"{field}.jump")
    else:
        jump = MomentSequence.from_jsonable(jump_data, field_name=f"{field}.jump")
    return ProcessSpec.compound(jump, rate)
