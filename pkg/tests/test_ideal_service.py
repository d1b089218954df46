import hypothesis
import hypothesis.strategies as st
import pytest

from src.models.errors import CapacityError, InputError, OperatorInvalidError
from src.models.models import EnumOperator, Ideal, TransitiveRelation
from src.services.ideal_service import IdealSpaceService
from src.services.kernel import CeSet, FiniteEnumeration, Fuel, StreamEnumeration, Verdict, emitted, member

from .conftest import QueryCounter, load_fixture
from .strategies import transitive_relations

SIERP = TransitiveRelation(carrier=2, pairs=frozenset({(0, 0), (0, 1), (1, 1)}))


def flat(size: int) -> TransitiveRelation:
    return TransitiveRelation(carrier=size, pairs=frozenset((i, i) for i in range(size)))


def test_sierpinski_has_two_ideals():
    points = [ideal.elements for ideal in IdealSpaceService.enumerate_ideals(SIERP)]
    assert points == [frozenset({0}), frozenset({0, 1})]


def test_irreflexive_elements_have_no_principal_ideal():
    relation = TransitiveRelation(carrier=2, pairs=frozenset({(0, 1)}))
    assert IdealSpaceService.enumerate_ideals(relation) == []
    assert IdealSpaceService.sweep_ideals(relation) == []


def test_empty_relation_has_no_points():
    assert IdealSpaceService.enumerate_ideals(TransitiveRelation(carrier=0)) == []
    assert IdealSpaceService.whole_space(TransitiveRelation(carrier=0)).size == 0


@hypothesis.settings(max_examples=500, deadline=None)
@hypothesis.given(transitive_relations())
def test_enumeration_agrees_with_sweep(relation):
    listed = [ideal.elements for ideal in IdealSpaceService.enumerate_ideals(relation)]
    assert listed == IdealSpaceService.sweep_ideals(relation)


@hypothesis.given(transitive_relations())
def test_closure_is_transitive(relation):
    assert IdealSpaceService.check_relation(relation).ok
    assert IdealSpaceService.transitive_closure(relation) == relation


def test_check_relation_reports_missing_pair():
    relation = TransitiveRelation(carrier=3, pairs=frozenset({(0, 1), (1, 2)}))
    report = IdealSpaceService.check_relation(relation)
    assert report.status == "violation"
    assert [finding.rule for finding in report.findings] == ["relation.transitivity"]
    assert report.findings[0].witness == {"a": 0, "b": 1, "c": 2}


def test_powerset_points_are_subsets():
    relation = IdealSpaceService.powerset_relation(2)
    assert relation == load_fixture("rel_powerset4.json")
    points = [ideal.elements for ideal in IdealSpaceService.enumerate_ideals(relation)]
    assert points == [frozenset({0}), frozenset({0, 1}), frozenset({0, 1, 2, 3}), frozenset({0, 2})]


def test_is_ideal_conditions():
    relation = IdealSpaceService.powerset_relation(2)
    assert IdealSpaceService.is_ideal(relation, {0, 1})
    assert not IdealSpaceService.is_ideal(relation, set())
    assert not IdealSpaceService.is_ideal(relation, {1})
    # 下に閉じているが有向でない
    assert not IdealSpaceService.is_ideal(relation, {0, 1, 2})
    with pytest.raises(InputError):
        IdealSpaceService.is_ideal(relation, {7})


def test_capacity_bound():
    relation = flat(17)
    with pytest.raises(CapacityError):
        IdealSpaceService.enumerate_ideals(relation)
    assert len(IdealSpaceService.enumerate_ideals(relation, bound=17)) == 17


def test_product_of_sierpinski_spaces():
    product = IdealSpaceService.product_relation(SIERP, SIERP)
    assert IdealSpaceService.check_relation(product).ok
    ideals = IdealSpaceService.enumerate_ideals(product)
    assert len(ideals) == 4
    pairs = {
        IdealSpaceService.pair_ideal(Ideal(over=SIERP, elements=x), Ideal(over=SIERP, elements=y)).elements
        for x in (frozenset({0}), frozenset({0, 1}))
        for y in (frozenset({0}), frozenset({0, 1}))
    }
    assert pairs == {ideal.elements for ideal in ideals}


def test_product_projections():
    left, right = IdealSpaceService.product_projections(SIERP, flat(2))
    point = IdealSpaceService.pair_ideal(
        Ideal(over=SIERP, elements=frozenset({0})), Ideal(over=flat(2), elements=frozenset({1}))
    )
    assert IdealSpaceService.apply_operator(left, point).elements == frozenset({0})
    assert IdealSpaceService.apply_operator(right, point).elements == frozenset({1})


def test_large_product_needs_larger_bound():
    product = IdealSpaceService.product_relation(flat(6), flat(6))
    with pytest.raises(CapacityError):
        IdealSpaceService.enumerate_ideals(product)
    assert len(IdealSpaceService.enumerate_ideals(product, bound=product.carrier)) == 36


def test_open_membership_on_finite_points():
    up = IdealSpaceService.basic_open(SIERP, 1)
    bottom = Ideal(over=SIERP, elements=frozenset({0}))
    top = Ideal(over=SIERP, elements=frozenset({0, 1}))
    assert IdealSpaceService.open_member(top, up) is Verdict.YES
    assert IdealSpaceService.open_member(bottom, up) is Verdict.NO
    space = IdealSpaceService.whole_space(SIERP)
    assert IdealSpaceService.open_points(space, up) == frozenset({1})
    assert IdealSpaceService.open_points(space, IdealSpaceService.basic_open(SIERP, 0)) == frozenset({0, 1})


def test_open_membership_searches_streams():
    naturals = TransitiveRelation(carrier=None)
    point = Ideal(over=naturals, stream=StreamEnumeration(step_fn=lambda k: 2 * k))
    found = IdealSpaceService.basic_open(naturals, 40)
    assert IdealSpaceService.open_member(point, found, Fuel(100)) is Verdict.YES
    missing = IdealSpaceService.basic_open(naturals, 41)
    assert IdealSpaceService.open_member(point, missing, Fuel(100)) is Verdict.UNKNOWN
    finite = Ideal(over=naturals, stream=FiniteEnumeration(items=(1, 2)))
    assert IdealSpaceService.open_member(finite, IdealSpaceService.basic_open(naturals, 5), Fuel(100)) is Verdict.NO


def test_open_from_points():
    space = IdealSpaceService.whole_space(SIERP)
    open_set = IdealSpaceService.open_from_points(space, {1})
    assert IdealSpaceService.open_points(space, open_set) == frozenset({1})
    assert IdealSpaceService.open_points(space, IdealSpaceService.open_from_points(space, set())) == frozenset()
    with pytest.raises(InputError):
        IdealSpaceService.open_from_points(space, {0})


def test_specialization_and_monotonicity():
    space = IdealSpaceService.whole_space(SIERP)
    assert IdealSpaceService.specialization(space) == [(0, 1)]
    assert IdealSpaceService.monotonicity_violations(space, space, {0: 0, 1: 1}) == []
    assert IdealSpaceService.monotonicity_violations(space, space, {0: 1, 1: 0}) == [(0, 1)]


def test_apply_identity_and_constant_operators():
    top = Ideal(over=SIERP, elements=frozenset({0, 1}))
    identity = IdealSpaceService.identity_operator(SIERP)
    assert IdealSpaceService.apply_operator(identity, top) == top
    constant = IdealSpaceService.constant_operator(SIERP, flat(2), {1})
    assert IdealSpaceService.apply_operator(constant, top).elements == frozenset({1})


def test_apply_operator_rejects_non_ideal_image():
    broken = EnumOperator(source=SIERP, target=flat(2), graph=frozenset({(frozenset(), 0), (frozenset(), 1)}))
    with pytest.raises(OperatorInvalidError):
        IdealSpaceService.apply_operator(broken, Ideal(over=SIERP, elements=frozenset({0})))


def test_apply_operator_to_stream():
    identity = IdealSpaceService.identity_operator(SIERP)
    image = IdealSpaceService.apply_operator(identity, Ideal(over=SIERP, stream=FiniteEnumeration(items=(0, 1))))
    assert image.stream is not None
    assert emitted(image.stream, Fuel(20)) == frozenset({0, 1})


def test_compose_operators():
    swap = EnumOperator(source=flat(2), target=flat(2), graph=frozenset({(frozenset({0}), 1), (frozenset({1}), 0)}))
    twice = IdealSpaceService.compose_operators(swap, swap)
    for a in range(2):
        point = Ideal(over=flat(2), elements=frozenset({a}))
        assert IdealSpaceService.apply_operator(twice, point) == point
    with pytest.raises(InputError):
        IdealSpaceService.compose_operators(swap, IdealSpaceService.identity_operator(SIERP))


@hypothesis.given(transitive_relations(max_carrier=5), st.data())
def test_composition_with_identity_preserves_images(relation, data):
    ideals = IdealSpaceService.enumerate_ideals(relation)
    hypothesis.assume(ideals)
    identity = IdealSpaceService.identity_operator(relation)
    twice = IdealSpaceService.compose_operators(identity, identity)
    ideal = data.draw(st.sampled_from(ideals))
    assert IdealSpaceService.apply_operator(twice, ideal) == ideal


def test_subspace_validates_points():
    space = IdealSpaceService.subspace(SIERP, [{0, 1}])
    assert space.size == 1
    with pytest.raises(InputError):
        IdealSpaceService.subspace(SIERP, [{1}])


RELATION_FIXTURES = ["rel_point.json", "rel_flat2.json", "rel_flat3.json", "rel_sierp.json", "rel_powerset4.json"]
FLAT2_TO_SIERP = EnumOperator(
    source=flat(2),
    target=SIERP,
    graph=frozenset({(frozenset({0}), 0), (frozenset({1}), 0), (frozenset({1}), 1)}),
)


@pytest.mark.parametrize("name", RELATION_FIXTURES)
def test_basic_open_membership_is_element_membership(name):
    relation = load_fixture(name)
    for point in IdealSpaceService.sweep_ideals(relation):
        for a in range(relation.carrier):
            expected = Verdict.YES if a in point else Verdict.NO
            opened = IdealSpaceService.basic_open(relation, a)
            assert IdealSpaceService.open_member(Ideal(over=relation, elements=point), opened) is expected
            streamed = Ideal(over=relation, stream=FiniteEnumeration(items=tuple(sorted(point))))
            assert IdealSpaceService.open_member(streamed, opened, Fuel(100)) is expected


@pytest.mark.parametrize("first", RELATION_FIXTURES)
@pytest.mark.parametrize("second", RELATION_FIXTURES)
def test_product_has_one_point_per_pair_of_points(first, second):
    left, right = load_fixture(first), load_fixture(second)
    product = IdealSpaceService.product_relation(left, right)
    count = len(IdealSpaceService.enumerate_ideals(product, bound=product.carrier))
    assert count == len(IdealSpaceService.enumerate_ideals(left)) * len(IdealSpaceService.enumerate_ideals(right))


def test_product_counts_and_unit():
    sierp, flat2, point = (load_fixture(name) for name in ("rel_sierp.json", "rel_flat2.json", "rel_point.json"))
    product = IdealSpaceService.product_relation(sierp, flat2)
    assert len(IdealSpaceService.enumerate_ideals(product, bound=product.carrier)) == 4

    # 1点空間との積は元の空間と点が1対1に対応する
    unit = IdealSpaceService.product_relation(point, sierp)
    _, project = IdealSpaceService.product_projections(point, sierp)
    images = [
        IdealSpaceService.apply_operator(project, ideal).elements
        for ideal in IdealSpaceService.enumerate_ideals(unit, bound=unit.carrier)
    ]
    assert sorted(images, key=sorted) == [ideal.elements for ideal in IdealSpaceService.enumerate_ideals(sierp)]


@hypothesis.settings(max_examples=100, deadline=None)
@hypothesis.given(transitive_relations(max_carrier=3), transitive_relations(max_carrier=3))
def test_operators_are_monotone(first, second):
    product = IdealSpaceService.product_relation(first, second)
    ideals = IdealSpaceService.enumerate_ideals(product, bound=product.carrier)
    operators = (*IdealSpaceService.product_projections(first, second), IdealSpaceService.identity_operator(product))
    for operator in operators:
        for smaller in ideals:
            for larger in ideals:
                if smaller.elements <= larger.elements:
                    low = IdealSpaceService.apply_operator(operator, smaller).elements
                    high = IdealSpaceService.apply_operator(operator, larger).elements
                    assert low <= high


def test_flat2_to_sierpinski_operator():
    images = [
        IdealSpaceService.apply_operator(FLAT2_TO_SIERP, Ideal(over=flat(2), elements=frozenset({a}))).elements
        for a in range(2)
    ]
    assert images == [frozenset({0}), frozenset({0, 1})]


@pytest.mark.parametrize(
    "second",
    [
        IdealSpaceService.identity_operator(SIERP),
        EnumOperator(source=SIERP, target=SIERP, graph=frozenset({(frozenset(), 0), (frozenset({0}), 1)})),
        EnumOperator(source=SIERP, target=flat(1), graph=frozenset({(frozenset({0}), 0)})),
    ],
)
def test_composite_agrees_with_sequential_application(second):
    composite = IdealSpaceService.compose_operators(second, FLAT2_TO_SIERP)
    for a in range(2):
        point = Ideal(over=flat(2), elements=frozenset({a}))
        sequential = IdealSpaceService.apply_operator(second, IdealSpaceService.apply_operator(FLAT2_TO_SIERP, point))
        assert IdealSpaceService.apply_operator(composite, point) == sequential


@pytest.mark.parametrize("target, found", [(5, Verdict.YES), (10**6, Verdict.UNKNOWN)])
def test_stream_image_stays_within_fuel(target, found):
    naturals = TransitiveRelation(carrier=None)
    counter = QueryCounter(lambda k: k)
    point = Ideal(over=naturals, stream=StreamEnumeration(step_fn=counter))
    operator = EnumOperator(source=naturals, target=naturals, graph=frozenset({(frozenset({target}), 0)}))
    image = IdealSpaceService.apply_operator(operator, point)
    assert member(CeSet(enumeration=image.stream), 0, Fuel(200)) is found
    assert counter.calls <= 200


def test_stream_image_is_index_pure():
    naturals = TransitiveRelation(carrier=None)
    point = Ideal(over=naturals, stream=StreamEnumeration(step_fn=lambda k: k))
    graph = frozenset({(frozenset({3}), 7), (frozenset({1, 4}), 8)})
    image = IdealSpaceService.apply_operator(EnumOperator(source=naturals, target=naturals, graph=graph), point)
    assert image.stream.at(19) == 7
    first = [image.stream.at(k) for k in range(20)]
    assert [image.stream.at(k) for k in range(20)] == first
    assert first.index(8) == 8 and first.index(7) == 7
    assert emitted(image.stream, Fuel(20)) == frozenset({7, 8})


def test_empty_operator_sends_a_stream_to_the_empty_ideal():
    naturals = TransitiveRelation(carrier=None)
    point = Ideal(over=naturals, stream=StreamEnumeration(step_fn=lambda k: k))
    image = IdealSpaceService.apply_operator(EnumOperator(source=naturals, target=naturals, graph=frozenset()), point)
    assert image.stream.length == 0
    assert emitted(image.stream, Fuel(50)) == frozenset()
