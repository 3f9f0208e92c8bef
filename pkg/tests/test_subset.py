import pytest
from hypothesis import given, strategies as st

from rlfs.subset import FeatureSubset


@given(st.lists(st.integers(0, 511), unique=True, max_size=40), st.randoms())
def test_insertion_order_does_not_matter(indices, rnd):
    shuffled = list(indices)
    rnd.shuffle(shuffled)
    a = FeatureSubset.empty(512)
    for i in indices:
        a = a.add(i)
    b = FeatureSubset.from_indices(shuffled, 512)
    assert a == b
    assert hash(a) == hash(b)
    assert len({a: 1, b: 2}) == 1
    assert a.cardinality == len(indices) == bin(a.bits).count("1")
    assert a.indices() == sorted(indices)


def test_available_and_membership():
    s = FeatureSubset.from_indices([0, 2], 4)
    assert list(s.available()) == [1, 3]
    assert 2 in s and 1 not in s
    assert s.hex() == "0x5"
    assert str(s) == "{0,2}"


def test_full_and_empty():
    assert FeatureSubset.full(3).is_full
    assert FeatureSubset.full(3).available().size == 0
    assert FeatureSubset.empty(3).cardinality == 0


def test_added_feature():
    s = FeatureSubset.from_indices([1], 5)
    assert s.added_feature(s.add(4)) == 4
    with pytest.raises(ValueError):
        s.added_feature(s)
    with pytest.raises(ValueError):
        s.added_feature(FeatureSubset.from_indices([1, 2, 3], 5))
    with pytest.raises(ValueError):
        s.added_feature(FeatureSubset.from_indices([0], 5))


def test_rejects_bad_input():
    with pytest.raises(IndexError):
        FeatureSubset.from_indices([5], 5)
    with pytest.raises(ValueError):
        FeatureSubset(1 << 5, 5)
    with pytest.raises(ValueError):
        FeatureSubset(0, 513)
    with pytest.raises(ValueError):
        FeatureSubset.from_indices([1], 3).add(1)
