"""Moment <-> free-cumulant transforms and the freeness calculus.

Free cumulants are the Mobius inversion of moments over the non-crossing
partition lattice: kappa_n = sum over NC(n) of the block-wise moment
products weighted by mu_n(pi, 1_n).  The univariate transforms evaluate
that sum by the first-block recursion (grouping NC(n) by the block
containing 1 turns it into a triangular system over gap compositions);
the multivariate transform is the literal weighted lattice sum.  Both
routes are cross-checked against each other in the test suite.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product as iter_product
from typing import Callable

from . import modes
from .errors import ResourceLimitError, SchemaError
from .ncpart import _nc_all, mobius_to_top_table

# NC(12) has 208,012 elements; transforms beyond this need an explicit opt-in.
MAX_ORDER_DEFAULT = 12


class _Sequence:
    """Shared behaviour of moment and cumulant sequences."""

    def __post_init__(self):
        if self.order != len(self.values):
            raise ValueError(f"order {self.order} does not match {len(self.values)} values")
        if self.order < 1:
            raise ValueError("order must be positive")
        if self.mode not in modes.MODES:
            raise ValueError(f"mode must be one of {modes.MODES}")

    @classmethod
    def of(cls, values, mode: str | None = None):
        """Build a sequence, inferring exact/float mode from the values."""
        values = tuple(values)
        if mode is None:
            mode = modes.infer_mode(values)
        return cls(len(values), modes.coerce_all(values, mode), mode)

    def to_jsonable(self) -> dict:
        return {
            "order": self.order,
            "mode": self.mode,
            "values": [modes.encode_number(v) for v in self.values],
        }

    @classmethod
    def from_jsonable(cls, data, field_name: str = "sequence"):
        if not isinstance(data, dict):
            raise SchemaError(f"{field_name}: expected an object")
        for key in ("order", "mode", "values"):
            if key not in data:
                raise SchemaError(f"{field_name}.{key}: missing")
        mode = data["mode"]
        if mode not in modes.MODES:
            raise SchemaError(f"{field_name}.mode: must be 'exact' or 'float', got {mode!r}")
        values = data["values"]
        if not isinstance(values, list) or not values:
            raise SchemaError(f"{field_name}.values: expected a non-empty array")
        order = data["order"]
        if not isinstance(order, int) or isinstance(order, bool) or order != len(values):
            raise SchemaError(f"{field_name}.order: must equal len(values) = {len(values)}")
        parsed = []
        for i, v in enumerate(values):
            x = modes.decode_number(v, field=f"{field_name}.values[{i}]")
            if mode == modes.EXACT and isinstance(x, float):
                raise SchemaError(
                    f"{field_name}.values[{i}]: exact mode requires integers or 'p/q' strings"
                )
            parsed.append(modes.coerce(x, mode))
        return cls(order, tuple(parsed), mode)


@dataclass(frozen=True)
class MomentSequence(_Sequence):
    """(m_1, ..., m_N) in a fixed arithmetic mode."""

    order: int
    values: tuple
    mode: str


@dataclass(frozen=True)
class CumulantSequence(_Sequence):
    """(kappa_1, ..., kappa_N) in a fixed arithmetic mode."""

    order: int
    values: tuple
    mode: str


@dataclass(frozen=True, eq=False)
class WordMomentOracle:
    """Joint moments phi(a_{w1}...a_{wn}) for words over a finite alphabet.

    `fn` must be deterministic and total on non-empty words up to `order`;
    evaluations are memoized.
    """

    alphabet: tuple
    order: int
    fn: Callable[[tuple], object]
    _memo: dict = field(default_factory=dict, repr=False)

    def word(self, w) -> tuple:
        word = tuple(w)
        if not word:
            raise ValueError("words must be non-empty")
        if len(word) > self.order:
            raise ValueError(f"word of length {len(word)} exceeds oracle order {self.order}")
        allowed = set(self.alphabet)
        for sym in word:
            if sym not in allowed:
                raise ValueError(f"symbol {sym!r} not in oracle alphabet")
        return word

    def eval(self, w):
        word = self.word(w)
        if word not in self._memo:
            self._memo[word] = self.fn(word)
        return self._memo[word]

    @classmethod
    def from_moments(cls, symbol, m: MomentSequence) -> "WordMomentOracle":
        """Single-variable oracle: phi(a^n) = m_n."""
        return cls((symbol,), m.order, lambda w: m.values[len(w) - 1])

    @classmethod
    def free_family(cls, cumulants: dict, order: int | None = None) -> "WordMomentOracle":
        """Joint moments of a freely independent family given per-letter cumulants.

        Mixed free cumulants vanish, so phi(word) is the NC(n) sum of
        block products of the single-letter cumulants over blocks whose
        letters are constant.
        """
        if order is None:
            order = min(k.order for k in cumulants.values())
        for sym, k in cumulants.items():
            if k.order < order:
                raise ValueError(f"cumulant sequence for {sym!r} is shorter than order {order}")

        def fn(word):
            n = len(word)
            total = 0
            for p in _nc_all(n):
                prod = 1
                for block in p.blocks:
                    letters = {word[i - 1] for i in block}
                    if len(letters) > 1:
                        prod = 0
                        break
                    prod *= cumulants[letters.pop()].values[len(block) - 1]
                total += prod
            return total

        return cls(tuple(cumulants), order, fn)

    @classmethod
    def tensor_family(cls, moments: dict, order: int | None = None) -> "WordMomentOracle":
        """Joint moments of classically independent commuting variables:
        phi(word) factorizes as the product of per-letter power moments."""
        if order is None:
            order = min(m.order for m in moments.values())

        def fn(word):
            prod = 1
            for sym in set(word):
                count = sum(1 for s in word if s == sym)
                prod *= moments[sym].values[count - 1]
            return prod

        return cls(tuple(moments), order, fn)


def _check_order(order: int, max_order: int):
    if order > max_order:
        raise ResourceLimitError(
            f"order {order} exceeds the configured transform maximum {max_order}"
        )


def _composition_sum(mvals, s: int, t: int):
    """Sum over weak compositions (i_1..i_s) of t of m_{i_1}...m_{i_s}.

    mvals[0] is 1; this is the coefficient of x^t in (sum_j mvals[j] x^j)^s.
    """
    row = list(mvals[: t + 1])
    for _ in range(s - 1):
        nxt = []
        for u in range(t + 1):
            acc = row[u] * mvals[0]
            for j in range(1, u + 1):
                acc += row[u - j] * mvals[j]
            nxt.append(acc)
        row = nxt
    return row[t]


def moments_to_cumulants(
    m: MomentSequence, *, max_order: int = MAX_ORDER_DEFAULT
) -> CumulantSequence:
    """Invert the non-crossing moment formula triangularly.

    kappa_n is m_n minus the contributions of every partition whose first
    block is proper, which only involve kappa_s for s < n.
    """
    _check_order(m.order, max_order)
    mvals = [modes.one(m.mode), *m.values]
    kappas: list = []
    for n in range(1, m.order + 1):
        total = mvals[n]
        for s in range(1, n):
            total -= kappas[s - 1] * _composition_sum(mvals, s, n - s)
        kappas.append(total)
    return CumulantSequence(m.order, tuple(kappas), m.mode)


def cumulants_to_moments(
    k: CumulantSequence, *, max_order: int = MAX_ORDER_DEFAULT
) -> MomentSequence:
    """m_n = sum over NC(n) of block-wise cumulant products."""
    _check_order(k.order, max_order)
    mvals = [modes.one(k.mode)]
    for n in range(1, k.order + 1):
        total = modes.zero(k.mode)
        for s in range(1, n + 1):
            total += k.values[s - 1] * _composition_sum(mvals, s, n - s)
        mvals.append(total)
    return MomentSequence(k.order, tuple(mvals[1:]), k.mode)


def multivariate_cumulant(o: WordMomentOracle, w, *, max_order: int = MAX_ORDER_DEFAULT):
    """kappa_n(a_{w1},...,a_{wn}): the Mobius-weighted NC(n) sum.

    phi_pi is evaluated through the oracle on the block-restricted
    subwords, order-preserving within each block.
    """
    word = o.word(w)
    n = len(word)
    _check_order(n, max_order)
    weights = mobius_to_top_table(n)
    total = 0
    for p in _nc_all(n):
        prod = weights[p]
        for block in p.blocks:
            prod *= o.eval(tuple(word[i - 1] for i in block))
        total += prod
    return total


def free_convolve(k1: CumulantSequence, k2: CumulantSequence) -> CumulantSequence:
    """Free additive convolution: cumulants add componentwise."""
    if k1.order != k2.order:
        raise ValueError(f"order mismatch: {k1.order} vs {k2.order}")
    if k1.mode != k2.mode:
        raise ValueError(f"mode mismatch: {k1.mode} vs {k2.mode}")
    return CumulantSequence(
        k1.order, tuple(a + b for a, b in zip(k1.values, k2.values)), k1.mode
    )


def max_mixed_cumulant(o: WordMomentOracle, order: int, *, max_order: int = MAX_ORDER_DEFAULT):
    """Freeness witness: max |mixed cumulant| over words of length 2..order.

    Zero (within mode tolerance) iff the family is free up to the tested
    order.  Vacuously zero for a single-letter alphabet.
    """
    if order > o.order:
        raise ValueError(f"order {order} exceeds oracle order {o.order}")
    _check_order(order, max_order)
    best = 0 * o.eval((o.alphabet[0],))
    if len(o.alphabet) < 2:
        return best
    for length in range(2, order + 1):
        for word in iter_product(o.alphabet, repeat=length):
            if len(set(word)) < 2:
                continue
            value = abs(multivariate_cumulant(o, word, max_order=max_order))
            if value > best:
                best = value
    return best
