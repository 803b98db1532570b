"""Symbolic distribution specs closed under free convolution.

Each spec knows its free cumulants in closed form (or via the transforms)
and the classifier decides whether a cumulant sequence is of free Poisson
type kappa_n = lambda * alpha^n, which is the computational content of
the "sum of two free Poisson elements is free Poisson iff the jump sizes
agree" dichotomy.
"""
from __future__ import annotations

from dataclasses import dataclass

from . import modes
from .cumulants import (
    MAX_ORDER_DEFAULT,
    CumulantSequence,
    MomentSequence,
    cumulants_to_moments,
    moments_to_cumulants,
)
from .errors import SchemaError


@dataclass(frozen=True)
class AtomicMeasure:
    """Finitely supported probability measure: ((location, weight), ...)."""

    atoms: tuple

    def __post_init__(self):
        if not self.atoms:
            raise ValueError("atomic measure needs at least one atom")
        locs = [x for x, _ in self.atoms]
        if sorted(locs) != locs or len(set(locs)) != len(locs):
            raise ValueError("atoms must be sorted by distinct locations")
        weights = [w for _, w in self.atoms]
        if any(w <= 0 for w in weights):
            raise ValueError("atom weights must be positive")
        total = sum(weights)
        exact = all(modes.is_exact_value(w) for w in weights)
        if (exact and total != 1) or (not exact and abs(total - 1) > 1e-9):
            raise ValueError(f"atom weights must sum to 1, got {total}")

    @classmethod
    def of(cls, atoms) -> "AtomicMeasure":
        """Merge duplicate locations, sort, and validate."""
        merged: dict = {}
        for x, w in atoms:
            merged[x] = merged.get(x, 0) + w
        return cls(tuple(sorted(merged.items())))

    @classmethod
    def point(cls, x) -> "AtomicMeasure":
        return cls(((x, 1),))

    def mode(self) -> str:
        return modes.infer_mode([v for atom in self.atoms for v in atom])

    def moment(self, n: int):
        return sum(w * x**n for x, w in self.atoms)

    def moments(self, order: int) -> tuple:
        return tuple(self.moment(n) for n in range(1, order + 1))

    def to_jsonable(self) -> dict:
        return {"atoms": [[modes.encode_number(x), modes.encode_number(w)] for x, w in self.atoms]}

    @classmethod
    def from_jsonable(cls, data, field: str = "jump"):
        if not isinstance(data, dict) or "atoms" not in data:
            raise SchemaError(f"{field}: expected an object with an 'atoms' array")
        atoms = data["atoms"]
        if not isinstance(atoms, list) or not atoms:
            raise SchemaError(f"{field}.atoms: expected a non-empty array")
        parsed = []
        for i, pair in enumerate(atoms):
            if not isinstance(pair, list) or len(pair) != 2:
                raise SchemaError(f"{field}.atoms[{i}]: expected an [x, w] pair")
            x = modes.decode_number(pair[0], field=f"{field}.atoms[{i}][0]")
            w = modes.decode_number(pair[1], field=f"{field}.atoms[{i}][1]")
            parsed.append((x, w))
        try:
            return cls.of(parsed)
        except ValueError as exc:
            raise SchemaError(f"{field}.atoms: {exc}") from exc


class DistributionSpec:
    """Marker base for the tagged distribution variants."""


@dataclass(frozen=True)
class FreePoisson(DistributionSpec):
    """kappa_n = lam * alpha^n (rate lam >= 0, jump size alpha)."""

    lam: object
    alpha: object

    def __post_init__(self):
        if self.lam < 0:
            raise ValueError("rate lambda must be non-negative")


@dataclass(frozen=True)
class CompoundFreePoisson(DistributionSpec):
    """kappa_n = lam * m_n(jump); jump is atoms or a raw moment sequence."""

    lam: object
    jump: object

    def __post_init__(self):
        if self.lam < 0:
            raise ValueError("rate lambda must be non-negative")
        if not isinstance(self.jump, (AtomicMeasure, MomentSequence)):
            raise ValueError("jump must be an AtomicMeasure or a MomentSequence")


@dataclass(frozen=True)
class Semicircle(DistributionSpec):
    """Only nonzero free cumulant is kappa_2 = r^2/4."""

    r: object

    def __post_init__(self):
        if self.r <= 0:
            raise ValueError("radius r must be positive")


@dataclass(frozen=True)
class FreeBernoulli(DistributionSpec):
    """Two-point law: m_n = alpha^n p + beta^n (1-p)."""

    alpha: object
    beta: object
    p: object

    def __post_init__(self):
        if not 0 <= self.p <= 1:
            raise ValueError("p must lie in [0, 1]")


@dataclass(frozen=True)
class PointMass(DistributionSpec):
    """Constant c: kappa_1 = c, higher cumulants vanish."""

    c: object


@dataclass(frozen=True)
class NotFreePoisson:
    """Classifier verdict: the sequence is not of free Poisson type."""


def jump_moments(jump, order: int, mode: str) -> tuple:
    """m_1..m_order of a jump datum (atoms or truncated moment sequence)."""
    if isinstance(jump, AtomicMeasure):
        return modes.coerce_all(jump.moments(order), mode)
    if isinstance(jump, MomentSequence):
        if jump.order < order:
            raise ValueError(
                f"jump moment data truncated at order {jump.order}, need {order}"
            )
        return modes.coerce_all(jump.values[:order], mode)
    raise ValueError("jump must be an AtomicMeasure or a MomentSequence")


def _spec_mode(d: DistributionSpec, mode: str | None) -> str:
    if mode is not None:
        return mode
    if isinstance(d, FreePoisson):
        return modes.infer_mode((d.lam, d.alpha))
    if isinstance(d, CompoundFreePoisson):
        jump_mode = d.jump.mode() if isinstance(d.jump, AtomicMeasure) else d.jump.mode
        return modes.FLOAT if modes.FLOAT in (jump_mode, modes.infer_mode((d.lam,))) else modes.EXACT
    if isinstance(d, Semicircle):
        return modes.infer_mode((d.r,))
    if isinstance(d, FreeBernoulli):
        return modes.infer_mode((d.alpha, d.beta, d.p))
    if isinstance(d, PointMass):
        return modes.infer_mode((d.c,))
    raise ValueError(f"unknown distribution spec {type(d).__name__}")


def cumulant_sequence(
    d: DistributionSpec, order: int, mode: str | None = None, *,
    max_order: int = MAX_ORDER_DEFAULT,
) -> CumulantSequence:
    """Free cumulants kappa_1..kappa_order of the distribution."""
    if order < 1:
        raise ValueError("order must be positive")
    m = _spec_mode(d, mode)
    if isinstance(d, FreePoisson):
        lam, alpha = modes.coerce(d.lam, m), modes.coerce(d.alpha, m)
        values = tuple(lam * alpha**n for n in range(1, order + 1))
    elif isinstance(d, CompoundFreePoisson):
        lam = modes.coerce(d.lam, m)
        values = tuple(lam * mn for mn in jump_moments(d.jump, order, m))
    elif isinstance(d, Semicircle):
        r = modes.coerce(d.r, m)
        values = tuple(r * r / 4 if n == 2 else modes.zero(m) for n in range(1, order + 1))
    elif isinstance(d, PointMass):
        values = tuple(
            modes.coerce(d.c, m) if n == 1 else modes.zero(m) for n in range(1, order + 1)
        )
    elif isinstance(d, FreeBernoulli):
        alpha, beta, p = (modes.coerce(x, m) for x in (d.alpha, d.beta, d.p))
        mvals = tuple(alpha**n * p + beta**n * (1 - p) for n in range(1, order + 1))
        return moments_to_cumulants(MomentSequence(order, mvals, m), max_order=max_order)
    else:
        raise ValueError(f"unknown distribution spec {type(d).__name__}")
    return CumulantSequence(order, values, m)


def moment_sequence(
    d: DistributionSpec, order: int, mode: str | None = None, *,
    max_order: int = MAX_ORDER_DEFAULT,
) -> MomentSequence:
    """Moments m_1..m_order, via the cumulant route."""
    return cumulants_to_moments(cumulant_sequence(d, order, mode, max_order=max_order),
                                max_order=max_order)


def classify_free_poisson(k: CumulantSequence, tol=1e-9):
    """Decide whether kappa_n = lambda * alpha^n for some (lambda, alpha).

    Parameterizes by (kappa_1, kappa_2): alpha = kappa_2/kappa_1 and
    lambda = kappa_1/alpha, then checks every order against
    |kappa_n - lambda*alpha^n| <= tol * max(1, |kappa_n|).
    """
    if k.order < 3:
        raise ValueError("classification needs cumulants up to order 3 at least")
    if all(abs(v) <= tol for v in k.values):
        zero = modes.zero(k.mode)
        return FreePoisson(zero, zero)
    k1, k2 = k.values[0], k.values[1]
    if abs(k1) <= tol:
        return NotFreePoisson()  # lambda*alpha != 0 forces kappa_1 != 0
    if abs(k2) <= tol:
        return NotFreePoisson()  # alpha = 0 would force every kappa_n to 0
    alpha = k2 / k1
    lam = k1 / alpha
    for n, v in enumerate(k.values, start=1):
        if abs(v - lam * alpha**n) > tol * max(1, abs(v)):
            return NotFreePoisson()
    return FreePoisson(lam, alpha)


def distribution_to_jsonable(d) -> dict:
    if isinstance(d, FreePoisson):
        return {"type": "free_poisson", "lambda": modes.encode_number(d.lam),
                "alpha": modes.encode_number(d.alpha)}
    if isinstance(d, CompoundFreePoisson):
        jump = d.jump.to_jsonable()
        return {"type": "compound_free_poisson", "lambda": modes.encode_number(d.lam),
                "jump": jump}
    if isinstance(d, Semicircle):
        return {"type": "semicircle", "r": modes.encode_number(d.r)}
    if isinstance(d, FreeBernoulli):
        return {"type": "free_bernoulli", "alpha": modes.encode_number(d.alpha),
                "beta": modes.encode_number(d.beta), "p": modes.encode_number(d.p)}
    if isinstance(d, PointMass):
        return {"type": "point_mass", "c": modes.encode_number(d.c)}
    if isinstance(d, NotFreePoisson):
        return {"type": "not_free_poisson"}
    raise ValueError(f"cannot serialize {type(d).__name__}")


def _field(data: dict, key: str, ctx: str):
    if key not in data:
        raise SchemaError(f"{ctx}.{key}: missing")
    return data[key]


def distribution_from_jsonable(data, field: str = "spec"):
    if not isinstance(data, dict) or "type" not in data:
        raise SchemaError(f"{field}: expected an object with a 'type' tag")
    tag = data["type"]
    num = lambda key: modes.decode_number(_field(data, key, field), field=f"{field}.{key}")
    try:
        if tag == "free_poisson":
            return FreePoisson(num("lambda"), num("alpha"))
        if tag == "compound_free_poisson":
            jump_data = _field(data, "jump", field)
            if isinstance(jump_data, dict) and "atoms" in jump_data:
                jump = AtomicMeasure.from_jsonable(jump_data, field=f"{field}.jump")
            else:
                jump = MomentSequence.from_jsonable(jump_data, field_name=f"{field}.jump")
            return CompoundFreePoisson(num("lambda"), jump)
        if tag == "semicircle":
            return Semicircle(num("r"))
        if tag == "free_bernoulli":
            return FreeBernoulli(num("alpha"), num("beta"), num("p"))
        if tag == "point_mass":
            return PointMass(num("c"))
        if tag == "not_free_poisson":
            return NotFreePoisson()
    except ValueError as exc:
        if isinstance(exc, SchemaError):
            raise
        raise SchemaError(f"{field}: {exc}") from exc
    raise SchemaError(f"{field}.type: unknown distribution tag {tag!r}")
