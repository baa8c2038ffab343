import numpy as np
import pytest

from src.domain.entities.trend_basis import TrendBasis
from src.domain.value_objects.hydro_values import NetworkLocation

from .factories import observation


def cox_de_boor(knots, degree, j, x):
    """Avaliação recursiva independente de N_{j,degree}(x)"""
    if degree == 0:
        return 1.0 if knots[j] <= x < knots[j + 1] else 0.0
    left = 0.0
    if knots[j + degree] > knots[j]:
        left = (x - knots[j]) / (knots[j + degree] - knots[j]) * cox_de_boor(knots, degree - 1, j, x)
    right = 0.0
    if knots[j + degree + 1] > knots[j + 1]:
        right = (knots[j + degree + 1] - x) / (knots[j + degree + 1] - knots[j + 1]) * cox_de_boor(
            knots, degree - 1, j + 1, x
        )
    return left + right


def test_three_spans_give_six_functions(trend, long_river):
    basis = trend.build_basis(long_river, 100.0)
    assert basis.size == 6
    river = basis.for_river("main")
    assert river.degree == 3
    assert river.knots == (0.0, 0.0, 0.0, 0.0, 100.0, 200.0, 300.0, 300.0, 300.0, 300.0)


def test_short_river_gets_a_constant(trend, chain_network):
    basis = trend.build_basis(chain_network, 100.0)
    assert basis.size == 1
    assert basis.rivers[0].is_constant
    assert trend.eval_basis(chain_network, basis, NetworkLocation("e1", 3.0)) == pytest.approx([1.0])


def test_basis_count_is_sum_over_rivers(trend, y_network):
    basis = trend.build_basis(y_network, 5.0)
    assert [r.river_id for r in basis.rivers] == ["main", "ra"]
    assert basis.size == sum(r.count for r in basis.rivers)
    assert basis.for_river("ra").offset == basis.for_river("main").count


def test_invalid_spacing_is_rejected(trend, long_river):
    with pytest.raises(ValueError):
        trend.build_basis(long_river, 0.0)


def test_clamped_end_is_a_single_function(trend, long_river):
    basis = trend.build_basis(long_river, 100.0)
    at_mouth = trend.eval_basis(long_river, basis, NetworkLocation("e", 300.0))
    assert at_mouth == pytest.approx([1.0, 0, 0, 0, 0, 0])


def test_values_match_recursive_evaluation(trend, long_river):
    basis = trend.build_basis(long_river, 100.0)
    river = basis.for_river("main")
    # chainage 150 km, meio do vão central
    values = trend.eval_basis(long_river, basis, NetworkLocation("e", 150.0))
    expected = [cox_de_boor(river.knots, 3, j, 150.0) for j in range(6)]
    assert values == pytest.approx(expected, abs=1e-12)


def test_partition_of_unity(trend, long_river, rng):
    basis = trend.build_basis(long_river, 100.0)
    for offset in rng.uniform(0.0, 300.0, size=25):
        values = trend.eval_basis(long_river, basis, NetworkLocation("e", float(offset)))
        assert abs(values.sum() - 1.0) < 1e-12


def test_rivers_are_not_coupled_at_confluences(trend, y_network):
    basis = trend.build_basis(y_network, 5.0)
    tributary = trend.eval_basis(y_network, basis, NetworkLocation("a", 4.0))
    main_columns = list(basis.for_river("main").columns)
    assert np.all(tributary[main_columns] == 0.0)


def test_design_matrices_constant_basis(trend, chain_network, day0):
    basis = TrendBasis.constant()
    F, f = trend.design_matrices(chain_network, basis, [observation("e2", 1.0, day0, 2.0)], NetworkLocation("e1", 0.0))
    assert F == pytest.approx(np.array([[1.0]]))
    assert f == pytest.approx([1.0])


def test_design_rows_match_eval_basis(trend, long_river, rng, day0):
    basis = trend.build_basis(long_river, 100.0)
    observations = [observation("e", float(x), day0, 0.0) for x in rng.uniform(0, 300, size=8)]
    observations.append(observations[0])
    F, _ = trend.design_matrices(long_river, basis, observations, NetworkLocation("e", 0.0))
    for row, obs in zip(F, observations):
        assert row == pytest.approx(trend.eval_basis(long_river, basis, obs.location))
    assert np.array_equal(F[0], F[-1])


def test_basis_has_local_support(trend, long_river, rng):
    basis = trend.build_basis(long_river, 50.0)
    knots = np.array(basis.for_river("main").knots)
    for offset in rng.uniform(0.0, 300.0, size=50):
        chainage = 300.0 - float(offset)
        values = trend.eval_basis(long_river, basis, NetworkLocation("e", float(offset)))
        active = np.flatnonzero(np.abs(values) > 1e-12)
        assert len(active) <= 4
        for j in active:
            assert knots[j] <= chainage <= knots[j + 4]
