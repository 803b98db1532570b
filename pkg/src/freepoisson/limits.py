"""Exact triangular-array engine for the free Poisson limit theorem.

A row at level N holds N freely independent, identically distributed
scaled projections a = alpha * p with phi(p) = lambda/N.  Cumulant
additivity over a free row makes the finite-N cumulants of the row sum
exactly N times the cell cumulants, so convergence to kappa_n =
lambda * alpha^n becomes a deterministic rational computation rather
than a sampling experiment.
"""
from __future__ import annotations

from dataclasses import dataclass

from . import modes
from .cumulants import (
    MAX_ORDER_DEFAULT,
    CumulantSequence,
    MomentSequence,
    WordMomentOracle,
    moments_to_cumulants,
    multivariate_cumulant,
)


@dataclass(frozen=True)
class TriangularArraySpec:
    """Families of (alpha_i, lambda_i) cells; one row cell per family.

    `orthogonal` states that the projections of distinct families within
    one cell are mutually orthogonal (and commute), which is the only
    joint law this engine supports.
    """

    families: tuple
    orthogonal: bool = True

    def __post_init__(self):
        if not self.families:
            raise ValueError("spec needs at least one family")
        for i, fam in enumerate(self.families):
            if len(fam) != 2:
                raise ValueError(f"family {i} must be an (alpha, lambda) pair")
            if fam[1] < 0:
                raise ValueError(f"family {i}: lambda must be non-negative")

    @classmethod
    def of(cls, families, orthogonal: bool = True) -> "TriangularArraySpec":
        return cls(tuple(tuple(f) for f in families), orthogonal)

    def family(self, i: int) -> tuple:
        if not 0 <= i < len(self.families):
            raise ValueError(f"family index {i} out of range")
        return self.families[i]


def _check_row(spec: TriangularArraySpec, N: int, lam) -> None:
    if not isinstance(N, int) or isinstance(N, bool) or N < 1:
        raise ValueError("N must be a positive integer")
    if N <= lam:
        raise ValueError(f"row size N={N} must exceed lambda={lam}")


def row_cell_moments(
    spec: TriangularArraySpec, i: int, N: int, order: int, mode: str | None = None
) -> MomentSequence:
    """Moments of one cell a = alpha*p: m_n = alpha^n * lambda/N (p idempotent)."""
    alpha, lam = spec.family(i)
    _check_row(spec, N, lam)
    m = mode if mode is not None else modes.infer_mode((alpha, lam))
    a = modes.coerce(alpha, m)
    ratio = modes.coerce(lam, m) / N
    return MomentSequence(order, tuple(a**n * ratio for n in range(1, order + 1)), m)


def row_sum_cumulants(
    spec: TriangularArraySpec, i: int, N: int, order: int, mode: str | None = None, *,
    max_order: int = MAX_ORDER_DEFAULT,
) -> CumulantSequence:
    """Exact cumulants of S_N: freeness makes them N times the cell cumulants."""
    cell = moments_to_cumulants(row_cell_moments(spec, i, N, order, mode), max_order=max_order)
    return CumulantSequence(order, tuple(N * v for v in cell.values), cell.mode)


def convergence_table(
    spec: TriangularArraySpec, i: int, Ns, order: int, mode: str | None = None, *,
    max_order: int = MAX_ORDER_DEFAULT,
) -> list[tuple]:
    """Rows (N, n, kappa_n(S_N), |kappa_n(S_N) - lambda*alpha^n|)."""
    alpha, lam = spec.family(i)
    rows = []
    for N in Ns:
        k = row_sum_cumulants(spec, i, N, order, mode, max_order=max_order)
        m = k.mode
        a, l = modes.coerce(alpha, m), modes.coerce(lam, m)
        for n in range(1, order + 1):
            target = l * a**n
            rows.append((N, n, k.values[n - 1], abs(k.values[n - 1] - target)))
    return rows


CONVERGENCE_HEADER = ("N", "n", "kappa", "error")


def convergence_table_csv(rows) -> list[str]:
    """CSV lines, header N,n,kappa,error; rationals as p/q strings."""
    lines = [",".join(CONVERGENCE_HEADER)]
    for N, n, kappa, error in rows:
        lines.append(f"{N},{n},{modes.encode_number(kappa)},{modes.encode_number(error)}")
    return lines


def convergence_table_jsonable(rows) -> dict:
    return {
        "header": list(CONVERGENCE_HEADER),
        "rows": [
            [N, n, modes.encode_number(kappa), modes.encode_number(error)]
            for N, n, kappa, error in rows
        ],
    }


def _orthogonal_cell_oracle(
    spec: TriangularArraySpec, N: int, order: int, mode: str
) -> WordMomentOracle:
    """Joint cell moments under orthogonality.

    Distinct commuting orthogonal projections annihilate each other, so
    any word mixing families is 0; a repeated-letter word collapses to
    its single projection and contributes alpha^n * lambda/N.
    """

    def fn(word):
        if len(set(word)) > 1:
            return modes.zero(mode)
        alpha, lam = spec.families[word[0]]
        a = modes.coerce(alpha, mode)
        return a ** len(word) * modes.coerce(lam, mode) / N

    return WordMomentOracle(tuple(range(len(spec.families))), order, fn)


def joint_mixed_cumulant(
    spec: TriangularArraySpec, word, N: int, mode: str | None = None, *,
    max_order: int = MAX_ORDER_DEFAULT,
):
    """Finite-N mixed cumulant kappa(S_N^{(i1)}, ..., S_N^{(in)}).

    Freeness across cells kills every cross-cell contribution, leaving N
    times the cell-level mixed cumulant; genuinely mixed words come out
    O(1/N).  Only orthogonal joint specs are accepted - without
    orthogonality the joint cell law is underdetermined.
    """
    if not spec.orthogonal:
        raise ValueError("joint arrays are supported only in the orthogonal case")
    w = tuple(word)
    if not w:
        raise ValueError("word must be non-empty")
    for sym in w:
        spec.family(sym)
    lam_max = max(lam for _, lam in spec.families)
    _check_row(spec, N, lam_max)
    if mode is None:
        mode = modes.infer_mode([x for fam in spec.families for x in fam])
    oracle = _orthogonal_cell_oracle(spec, N, len(w), mode)
    return N * multivariate_cumulant(oracle, w, max_order=max_order)
