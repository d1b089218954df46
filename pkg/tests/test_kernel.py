import hypothesis
import hypothesis.strategies as st
import pytest

from src.models.errors import InputError
from src.services.kernel import (
    PASS,
    CeSet,
    EnumerationFactory,
    FiniteEnumeration,
    Fuel,
    StreamEnumeration,
    Verdict,
    dovetail,
    emitted,
    member,
    pair,
    set_decode,
    set_encode,
    unpair,
)

from .conftest import QueryCounter


def test_finite_enumeration_is_index_pure():
    enumeration = EnumerationFactory.create([3, 1, 2])
    assert [enumeration.at(k) for k in range(5)] == [1, 2, 3, PASS, PASS]
    assert enumeration.at(1) == enumeration.at(1)
    assert enumeration.length == 3


def test_stream_enumeration_passes_and_stops_at_length():
    evens = StreamEnumeration(step_fn=lambda k: k if k % 2 == 0 else PASS)
    assert [evens.at(k) for k in range(5)] == [0, PASS, 2, PASS, 4]
    assert evens.length is None
    bounded = EnumerationFactory.create(lambda k: k * k, length=3)
    assert [bounded.at(k) for k in range(4)] == [0, 1, 4, PASS]


def test_dovetail_tags_items_with_source_index():
    search = dovetail([FiniteEnumeration(items=(10, 11)), FiniteEnumeration(items=(20,))])
    assert [search.at(k) for k in range(4)] == [(0, 10), (1, 20), (0, 11), PASS]
    assert search.length == 4


def test_dovetail_is_fair_with_an_infinite_source():
    naturals = StreamEnumeration(step_fn=lambda k: k)
    search = dovetail([naturals, FiniteEnumeration(items=(7,))])
    assert search.length is None
    assert (1, 7) in {search.at(k) for k in range(4)}
    assert (0, 5) in {search.at(k) for k in range(12)}


def test_dovetail_requires_a_source():
    with pytest.raises(InputError):
        dovetail([])


def test_member_finds_or_gives_up():
    squares = CeSet.of(lambda k: k * k)
    assert member(squares, 49, Fuel(10)) is Verdict.YES
    assert member(squares, 50, Fuel(100)) is Verdict.UNKNOWN
    assert member(CeSet.of([1, 2]), 3, Fuel(100)) is Verdict.UNKNOWN


def test_fuel_must_be_non_negative():
    with pytest.raises(InputError):
        Fuel(-1)


def test_emitted_respects_fuel():
    assert emitted(StreamEnumeration(step_fn=lambda k: k), Fuel(3)) == frozenset({0, 1, 2})
    assert CeSet.of(lambda k: k).finite_items is None
    assert CeSet.of([4, 4, 5]).finite_items == frozenset({4, 5})


def test_empty_enumeration():
    assert EnumerationFactory.empty().length == 0
    assert EnumerationFactory.empty().at(0) is PASS


@hypothesis.given(st.integers(min_value=0, max_value=10_000), st.integers(min_value=0, max_value=10_000))
def test_pair_unpair_inverse(a, b):
    assert unpair(pair(a, b)) == (a, b)


def test_pair_coding_round_trips_below_2_16():
    for n in range(1 << 16):
        assert pair(*unpair(n)) == n


def test_pair_values():
    assert [pair(0, 0), pair(1, 0), pair(0, 1), pair(2, 0)] == [0, 1, 2, 3]


@hypothesis.given(st.frozensets(st.integers(min_value=0, max_value=40)))
def test_set_coding_inverse(elements):
    assert set_decode(set_encode(elements)) == elements


def test_set_coding_rejects_negatives():
    with pytest.raises(InputError):
        set_encode({-1})
    assert set_decode(0b101) == frozenset({0, 2})


def test_set_coding_round_trips_below_2_16():
    for code in range(1 << 16):
        assert set_encode(set_decode(code)) == code


@hypothesis.given(st.lists(st.lists(st.integers(min_value=0, max_value=30), max_size=6), min_size=1, max_size=4))
def test_dovetail_emits_the_union_of_its_sources(sources):
    enumerations = [EnumerationFactory.create(items) for items in sources]
    search = dovetail(enumerations)
    assert search.length is not None
    found = emitted(search, Fuel(search.length))
    assert {value for _, value in found} == set().union(*(set(items) for items in sources))
    for index, enumeration in enumerate(enumerations):
        assert {value for i, value in found if i == index} == emitted(enumeration, Fuel(search.length))


@hypothesis.given(st.integers(min_value=0, max_value=300))
def test_fueled_search_queries_at_most_fuel_steps(fuel):
    counter = QueryCounter(lambda k: 2 * k)
    other = QueryCounter(lambda k: 2 * k + 1)
    search = dovetail([StreamEnumeration(step_fn=counter), StreamEnumeration(step_fn=other)])
    assert member(CeSet(enumeration=search), (0, -1), Fuel(fuel)) is Verdict.UNKNOWN
    assert counter.calls + other.calls <= fuel
    emitted(search, Fuel(fuel))
    assert counter.calls + other.calls <= 2 * fuel
