import itertools
import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from slsdesign import (CapacityError, DesignMeasure, DomainError, InvalidMeasureError,
                       class_measure, collapse_to_classes, enumerate_binary,
                       enumerate_chemical_balance, uniform_measure)
from slsdesign.design_space import measure_from_dict


def test_q2_points_and_classes():
    space = enumerate_binary(2)
    assert space.points.tolist() == [[0, 1], [1, 0], [1, 1]]
    assert space.class_of.tolist() == [1, 1, 2]
    assert space.n == 3


def test_q4_class_sizes():
    space = enumerate_binary(4)
    assert space.n == 15
    assert space.class_sizes().tolist() == [4, 6, 4, 1]


def test_q6_weight3_count_by_brute_force():
    brute = sum(1 for v in itertools.product((0, 1), repeat=6) if sum(v) == 3)
    space = enumerate_binary(6)
    assert space.n == 63
    assert space.class_sizes()[2] == brute == 20


@pytest.mark.parametrize("q", range(2, 11))
def test_binary_space_is_complete(q):
    space = enumerate_binary(q)
    assert space.n == 2 ** q - 1
    assert space.class_sizes().tolist() == [math.comb(q, j) for j in range(1, q + 1)]
    assert len({tuple(p) for p in space.points.tolist()}) == space.n
    assert not np.any(space.points.sum(axis=1) == 0)
    assert np.array_equal(space.points.sum(axis=1), space.class_of)
    # ordered by class, then lexicographically within class
    keys = [(int(c), tuple(p)) for c, p in zip(space.class_of, space.points.tolist())]
    assert keys == sorted(keys)


@pytest.mark.parametrize("q", [0, 1, 21, 2.5])
def test_capacity(q):
    with pytest.raises(CapacityError):
        enumerate_binary(q)


def test_enumeration_is_byte_identical():
    a = json.dumps(enumerate_binary(7).to_dict())
    b = json.dumps(enumerate_binary(7).to_dict())
    assert a == b


def test_chemical_balance_space():
    space = enumerate_chemical_balance(3)
    assert space.n == 26
    assert set(np.unique(space.points)) == {-1, 0, 1}
    assert space.index_of((1, -1, 1)) >= 0
    with pytest.raises(DomainError):
        space.index_of((2, 0, 0))


@pytest.mark.parametrize("q,n", [(2, 3), (3, 7), (4, 15)])
def test_uniform(q, n):
    m = uniform_measure(enumerate_binary(q))
    assert np.allclose(m.masses, 1.0 / n)
    assert np.allclose(m.class_masses, 1.0 / n)


def test_class_measure_ev2_q4():
    space = enumerate_binary(4)
    m = class_measure(space, [0, 1 / 6, 0, 0])
    assert m.support_size() == 6
    assert np.all(space.class_of[m.support] == 2)
    assert np.allclose(m.masses[m.support], 1 / 6)


def test_class_measure_odd_q3():
    m = class_measure(enumerate_binary(3), [0, 1 / 3, 0])
    assert m.support_size() == 3


def test_class_measure_q2_is_uniform():
    m = class_measure(enumerate_binary(2), [1 / 3, 1 / 3])
    assert np.allclose(m.masses, 1 / 3)


def test_class_measure_rejects_bad_normalization():
    with pytest.raises(InvalidMeasureError):
        class_measure(enumerate_binary(3), [0.1, 0.1, 0.1])
    with pytest.raises(InvalidMeasureError):
        class_measure(enumerate_binary(3), [-0.1, 0.4, 0.1])


def test_collapse():
    space = enumerate_binary(4)
    assert np.allclose(collapse_to_classes(uniform_measure(space)), 1 / 15)
    assert np.allclose(collapse_to_classes(class_measure(space, [0, 1 / 6, 0, 0])), [0, 1 / 6, 0, 0])
    masses = np.full(15, 1 / 15)
    masses[0] += 0.01
    masses[1] -= 0.01
    assert collapse_to_classes(DesignMeasure(space, masses)) is None


@settings(max_examples=60, deadline=None)
@given(q=st.integers(2, 8), data=st.data())
def test_class_round_trip(q, data):
    space = enumerate_binary(q)
    raw = data.draw(st.lists(st.floats(0, 1), min_size=q, max_size=q).filter(lambda v: sum(v) > 0.01))
    sizes = space.class_sizes()
    pi = np.array(raw) / (sizes @ np.array(raw))
    m = class_measure(space, pi)
    back = collapse_to_classes(m, tol=0.0)
    assert back is not None
    assert np.array_equal(back, m.class_masses)
    if abs(sizes @ pi - 1) <= 1e-12:
        assert np.array_equal(back, pi)


def test_measure_validation():
    space = enumerate_binary(2)
    with pytest.raises(InvalidMeasureError):
        DesignMeasure(space, [0.5, 0.5, 0.5])
    with pytest.raises(InvalidMeasureError):
        DesignMeasure(space, [1.2, -0.2, 0.0])
    with pytest.raises(InvalidMeasureError):
        DesignMeasure(space, [0.5, 0.5])


def test_measure_json_round_trip():
    space = enumerate_binary(3)
    m = class_measure(space, [0, 1 / 3, 0])
    data = json.loads(m.to_json())
    assert set(data) == {"q", "kind", "masses", "class_masses"}
    back = measure_from_dict(data, space)
    assert np.array_equal(back.masses, m.masses)
    assert np.array_equal(back.class_masses, m.class_masses)
