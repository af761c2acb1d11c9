import pytest

from chainfix.errors import DomainError, InvalidInstanceError
from chainfix.spaces import (
    BoxSpace,
    FiniteSpace,
    point_jsonable,
    product_comparable,
    product_eta,
    product_leq,
)


def chain_space(n: int = 3) -> FiniteSpace:
    dist = [[abs(i - j) for j in range(n)] for i in range(n)]
    order = [[i <= j for j in range(n)] for i in range(n)]
    return FiniteSpace.from_lists([f"p{i}" for i in range(n)], dist, order)


class TestFiniteSpace:
    def test_basic_queries(self):
        sp = chain_space(3)
        assert sp.size == 3
        assert list(sp.points()) == [0, 1, 2]
        assert sp.distance(0, 2) == 2
        assert sp.leq(0, 2) and not sp.leq(2, 0)

    def test_rejects_asymmetric_metric(self):
        dist = [[0, 1], [2, 0]]
        order = [[True, True], [False, True]]
        with pytest.raises(InvalidInstanceError) as exc:
            FiniteSpace.from_lists(["a", "b"], dist, order)
        assert "symmetr" in str(exc.value)

    def test_rejects_zero_distance_between_distinct_points(self):
        dist = [[0, 0], [0, 0]]
        order = [[True, False], [False, True]]
        with pytest.raises(InvalidInstanceError):
            FiniteSpace.from_lists(["a", "b"], dist, order)

    def test_rejects_nonzero_diagonal(self):
        dist = [[1, 1], [1, 0]]
        order = [[True, False], [False, True]]
        with pytest.raises(InvalidInstanceError):
            FiniteSpace.from_lists(["a", "b"], dist, order)

    def test_rejects_triangle_violation_with_witness(self):
        # d(0,2)=5 > d(0,1)+d(1,2)=2
        dist = [[0, 1, 5], [1, 0, 1], [5, 1, 0]]
        order = [[True] * 3] * 1 + [[False, True, False], [False, False, True]]
        order = [[i <= j for j in range(3)] for i in range(3)]
        with pytest.raises(InvalidInstanceError) as exc:
            FiniteSpace.from_lists(["a", "b", "c"], dist, order)
        assert "triangle" in str(exc.value)

    def test_rejects_nonreflexive_order(self):
        dist = [[0, 1], [1, 0]]
        order = [[False, False], [False, True]]
        with pytest.raises(InvalidInstanceError):
            FiniteSpace.from_lists(["a", "b"], dist, order)

    def test_rejects_antisymmetry_violation(self):
        dist = [[0, 1], [1, 0]]
        order = [[True, True], [True, True]]
        with pytest.raises(InvalidInstanceError) as exc:
            FiniteSpace.from_lists(["a", "b"], dist, order)
        assert "antisymmet" in str(exc.value)

    def test_rejects_transitivity_violation(self):
        dist = [[abs(i - j) for j in range(3)] for i in range(3)]
        order = [
            [True, True, False],
            [False, True, True],
            [False, False, True],
        ]
        with pytest.raises(InvalidInstanceError) as exc:
            FiniteSpace.from_lists(["a", "b", "c"], dist, order)
        assert "transitiv" in str(exc.value)

    def test_validate_point_range(self):
        sp = chain_space(2)
        with pytest.raises(DomainError):
            sp.validate_point(2)
        with pytest.raises(DomainError):
            sp.validate_point((0.5,))


class TestBoxSpace:
    def test_distance_is_coordinate_sum(self):
        box = BoxSpace((0.0, 0.0), (1.0, 1.0))
        assert box.distance((0.0, 0.0), (1.0, 0.5)) == 1.5

    def test_order_is_componentwise(self):
        box = BoxSpace((0.0, 0.0), (1.0, 1.0))
        assert box.leq((0.1, 0.2), (0.3, 0.2))
        assert not box.leq((0.1, 0.5), (0.3, 0.2))

    def test_rejects_inverted_bounds(self):
        with pytest.raises(InvalidInstanceError):
            BoxSpace((1.0,), (0.0,))

    def test_validate_point_outside(self):
        box = BoxSpace((0.0,), (1.0,))
        with pytest.raises(DomainError):
            box.validate_point((1.5,))
        with pytest.raises(DomainError):
            box.validate_point((0.5, 0.5))


class TestProductOrder:
    def test_product_leq_flips_second_component(self):
        sp = chain_space(3)
        # (0, 2) is a product lower bound of (1, 1)
        assert product_leq(sp, (0, 2), (1, 1))
        assert not product_leq(sp, (1, 1), (0, 2)) or (1, 1) == (0, 2)

    def test_product_comparable_either_direction(self):
        sp = chain_space(3)
        assert product_comparable(sp, (1, 1), (0, 2))
        assert product_comparable(sp, (0, 2), (1, 1))
        assert not product_comparable(sp, (0, 0), (1, 2))

    def test_product_eta_adds_component_distances(self):
        sp = chain_space(3)
        assert product_eta(sp, (0, 2), (2, 0)) == 4


def test_point_jsonable_shapes():
    assert point_jsonable(3) == 3
    assert point_jsonable((0.5,)) == 0.5
    assert point_jsonable((0.5, 0.25)) == [0.5, 0.25]
