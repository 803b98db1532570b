import math
from fractions import Fraction

import pytest

from freepoisson.cumulants import CumulantSequence, MomentSequence, free_convolve
from freepoisson.distributions import (
    AtomicMeasure,
    CompoundFreePoisson,
    FreeBernoulli,
    FreePoisson,
    NotFreePoisson,
    PointMass,
    Semicircle,
    classify_free_poisson,
    cumulant_sequence,
    distribution_from_jsonable,
    distribution_to_jsonable,
    moment_sequence,
)
from freepoisson.errors import SchemaError
from freepoisson.ncpart import catalan

HALF = Fraction(1, 2)


class TestAtomicMeasure:
    def test_merge_and_sort(self):
        m = AtomicMeasure.of([(1, HALF), (-1, Fraction(1, 4)), (1, Fraction(1, 4))])
        assert m.atoms == ((-1, Fraction(1, 4)), (1, Fraction(3, 4)))

    def test_moments(self):
        m = AtomicMeasure.of([(1, HALF), (-1, HALF)])
        assert m.moments(4) == (0, 1, 0, 1)

    def test_weight_validation(self):
        with pytest.raises(ValueError):
            AtomicMeasure.of([(0, HALF)])
        with pytest.raises(ValueError):
            AtomicMeasure.of([(0, Fraction(3, 2)), (1, Fraction(-1, 2))])

    def test_float_tolerance(self):
        AtomicMeasure.of([(0.0, 0.3), (1.0, 0.7 + 1e-12)])
        with pytest.raises(ValueError):
            AtomicMeasure.of([(0.0, 0.3), (1.0, 0.6)])

    def test_json_roundtrip(self):
        m = AtomicMeasure.of([(Fraction(1, 3), HALF), (2, HALF)])
        assert AtomicMeasure.from_jsonable(m.to_jsonable()) == m
        with pytest.raises(SchemaError, match=r"atoms\[0\]"):
            AtomicMeasure.from_jsonable({"atoms": [[1]]})


class TestCumulantSequences:
    def test_free_poisson_closed_form(self):
        assert cumulant_sequence(FreePoisson(2, 3), 3).values == (6, 18, 54)

    def test_semicircle(self):
        assert cumulant_sequence(Semicircle(2), 4).values == (0, 1, 0, 0)

    def test_compound_symmetric_two_point(self):
        nu = AtomicMeasure.of([(1, HALF), (-1, HALF)])
        assert cumulant_sequence(CompoundFreePoisson(2, nu), 4).values == (0, 2, 0, 2)

    def test_point_mass(self):
        assert cumulant_sequence(PointMass(Fraction(5, 2)), 3).values == (Fraction(5, 2), 0, 0)

    def test_compound_with_moment_sequence_jump(self):
        jump = MomentSequence.of([1, 1, 1, 1])
        d = CompoundFreePoisson(3, jump)
        assert cumulant_sequence(d, 4).values == (3, 3, 3, 3)
        with pytest.raises(ValueError, match="truncated"):
            cumulant_sequence(d, 5)

    def test_parameter_domains(self):
        with pytest.raises(ValueError):
            FreePoisson(-1, 1)
        with pytest.raises(ValueError):
            Semicircle(0)
        with pytest.raises(ValueError):
            FreeBernoulli(1, 0, 2)
        with pytest.raises(ValueError):
            CompoundFreePoisson(1, "nope")


class TestMomentSequences:
    def test_free_poisson_catalan(self):
        assert moment_sequence(FreePoisson(1, 1), 5).values == (1, 2, 5, 14, 42)

    def test_point_mass_powers(self):
        c = Fraction(3, 2)
        assert moment_sequence(PointMass(c), 3).values == (c, c**2, c**3)

    def test_free_bernoulli_projection(self):
        m = moment_sequence(FreeBernoulli(1, 0, 0.1), 2)
        assert m.mode == "float"
        assert math.isclose(m.values[0], 0.1, abs_tol=1e-12)
        assert math.isclose(m.values[1], 0.1, abs_tol=1e-12)

    def test_free_bernoulli_exact_two_point(self):
        m = moment_sequence(FreeBernoulli(2, -1, HALF), 4)
        assert m.values == tuple(2**n * HALF + (-1) ** n * HALF for n in range(1, 5))

    def test_semicircle_even_odd(self):
        r = Fraction(3)
        m = moment_sequence(Semicircle(r), 10)
        for n, v in enumerate(m.values, start=1):
            if n % 2:
                assert v == 0
            else:
                assert v == (r * r / 4) ** (n // 2) * catalan(n // 2)


class TestClassifier:
    def test_constant_sequence(self):
        got = classify_free_poisson(CumulantSequence.of([3, 3, 3, 3]))
        assert got == FreePoisson(3, 1)

    def test_alternating_rejected(self):
        got = classify_free_poisson(CumulantSequence.of([0, 2, 0, 2]))
        assert got == NotFreePoisson()

    def test_zero_sequence(self):
        assert classify_free_poisson(CumulantSequence.of([0, 0, 0])) == FreePoisson(0, 0)

    def test_short_sequence_rejected(self):
        with pytest.raises(ValueError):
            classify_free_poisson(CumulantSequence.of([1, 1]))

    def test_zero_first_cumulant_nonzero_rest(self):
        assert classify_free_poisson(CumulantSequence.of([0, 1, 1])) == NotFreePoisson()

    def test_zero_second_cumulant(self):
        assert classify_free_poisson(CumulantSequence.of([1, 0, 1])) == NotFreePoisson()

    def test_recovers_parameters_exactly(self):
        for lam in (HALF, 1, 3):
            for alpha in (-2, -1, HALF, 1):
                k = cumulant_sequence(FreePoisson(lam, alpha), 10)
                got = classify_free_poisson(k)
                assert got == FreePoisson(Fraction(lam), Fraction(alpha))

    def test_compound_point_jump_is_free_poisson(self):
        for lam, alpha in ((1, 2), (HALF, -1), (3, HALF)):
            a = cumulant_sequence(CompoundFreePoisson(lam, AtomicMeasure.point(alpha)), 10)
            b = cumulant_sequence(FreePoisson(lam, alpha), 10)
            assert a == b

    def test_convolution_dichotomy(self):
        same = free_convolve(
            cumulant_sequence(FreePoisson(1, 2), 6), cumulant_sequence(FreePoisson(3, 2), 6)
        )
        assert classify_free_poisson(same) == FreePoisson(4, 2)
        for a1, a2 in ((1, -1), (1, 2), (2, -2)):
            mixed = free_convolve(
                cumulant_sequence(FreePoisson(1, a1), 6),
                cumulant_sequence(FreePoisson(1, a2), 6),
            )
            assert classify_free_poisson(mixed) == NotFreePoisson()


class TestSerialization:
    def test_roundtrips(self):
        specs = [
            FreePoisson(Fraction(1, 2), -2),
            CompoundFreePoisson(2, AtomicMeasure.of([(1, HALF), (-1, HALF)])),
            CompoundFreePoisson(1, MomentSequence.of([1, 2, 5])),
            Semicircle(2.0),
            FreeBernoulli(1, 0, 0.25),
            PointMass(Fraction(7, 3)),
            NotFreePoisson(),
        ]
        for d in specs:
            assert distribution_from_jsonable(distribution_to_jsonable(d)) == d

    def test_schema_errors(self):
        with pytest.raises(SchemaError, match="type"):
            distribution_from_jsonable({})
        with pytest.raises(SchemaError, match="unknown"):
            distribution_from_jsonable({"type": "gaussian"})
        with pytest.raises(SchemaError, match="lambda"):
            distribution_from_jsonable({"type": "free_poisson", "alpha": 1})
        with pytest.raises(SchemaError):
            distribution_from_jsonable({"type": "free_poisson", "lambda": -1, "alpha": 1})
        with pytest.raises(SchemaError, match="jump"):
            distribution_from_jsonable(
                {"type": "compound_free_poisson", "lambda": 1, "jump": {"atoms": []}}
            )
