import dataclasses

import hypothesis
import hypothesis.strategies as st
import pytest

from src.models.errors import DomainError, InputError
from src.models.models import CategoryInstance, CntMorphism, FunctorInstance, NatTransInstance, Per, TransitiveRelation
from src.services.category_service import CategoryService
from src.services.cntsets_service import CntSetsService
from src.services.ideal_service import IdealSpaceService

from .conftest import load_fixture
from .strategies import arrow_functors, discrete_functors, graph_from_choice, z2_functors

SIERP = TransitiveRelation(carrier=2, pairs=frozenset({(0, 0), (0, 1), (1, 1)}))


def rules(report):
    return {finding.rule for finding in report.findings}


@pytest.mark.parametrize(
    "name",
    ["category_discrete_flat2.json", "category_discrete_sierp.json", "category_z2.json", "category_arrow.json"],
)
def test_fixture_categories_are_valid(name):
    assert CategoryService.check_category(load_fixture(name)).ok


def test_z2_with_wrong_unit_is_rejected(z2_category):
    comp = dict(z2_category.comp)
    comp[(1, 0)] = 0
    report = CategoryService.check_category(dataclasses.replace(z2_category, comp=comp))
    assert report.status == "violation"
    assert "category.right-unit" in rules(report)


def test_idempotent_monoid_is_a_category(z2_category):
    comp = dict(z2_category.comp)
    comp[(1, 1)] = 1
    assert CategoryService.check_category(dataclasses.replace(z2_category, comp=comp)).ok


def test_arrow_with_bad_composite_target(arrow_category):
    comp = dict(arrow_category.comp)
    comp[(2, 0)] = 0
    report = CategoryService.check_category(dataclasses.replace(arrow_category, comp=comp))
    assert {"category.tar-comp", "category.right-unit"} <= rules(report)


def test_identity_with_wrong_source(arrow_category):
    report = CategoryService.check_category(dataclasses.replace(arrow_category, identity=(0, 2)))
    assert rules(report) >= {"category.id-src"}


def test_comp_table_must_cover_composable_pairs(arrow_category):
    comp = dict(arrow_category.comp)
    del comp[(2, 0)]
    with pytest.raises(DomainError):
        dataclasses.replace(arrow_category, comp=comp)


def test_discrete_categories():
    terminal = CategoryService.discrete_category(TransitiveRelation(carrier=1, pairs=frozenset({(0, 0)})))
    assert terminal.objects.size == 1 and terminal.morphisms.size == 1
    sierp = CategoryService.discrete_category(SIERP)
    assert sierp.objects.size == 2
    assert sierp.composable_pairs == ((0, 0), (1, 1))
    assert CategoryService.check_category(sierp).ok


@hypothesis.given(st.sampled_from(["rel_point.json", "rel_sierp.json", "rel_flat2.json", "rel_powerset4.json"]))
def test_discrete_category_of_every_relation_fixture(name):
    assert CategoryService.check_category(CategoryService.discrete_category(load_fixture(name))).ok


def test_tables_must_be_monotone():
    space = IdealSpaceService.whole_space(SIERP)
    flipped = CategoryInstance(
        objects=space,
        morphisms=space,
        src=(1, 0),
        tar=(1, 0),
        identity=(1, 0),
        comp={(0, 0): 0, (1, 1): 1},
    )
    report = CategoryService.check_category(flipped)
    assert rules(report) == {"category.continuity"}


@pytest.mark.parametrize(
    "name",
    [
        "functor_f0.json",
        "functor_const.json",
        "functor_f1.json",
        "functor_z2_const.json",
        "functor_arrow.json",
        "functor_sierp.json",
    ],
)
def test_fixture_functors_are_valid(name):
    assert CategoryService.check_functor(load_fixture(name)).ok


def test_non_involution_breaks_composition():
    functor = load_fixture("functor_f1.json")
    per = functor.objects[0]
    collapse = CntMorphism(graph=graph_from_choice(per, per, [1, 1]), src=per, tar=per)
    broken = dataclasses.replace(functor, morphisms=(functor.morphisms[0], collapse))
    report = CategoryService.check_functor(broken)
    assert "functor.composition" in rules(report)
    assert report.findings[0].witness == {"g": 1, "f": 1}


def test_identity_must_map_to_identity():
    functor = load_fixture("functor_f1.json")
    broken = dataclasses.replace(functor, morphisms=(functor.morphisms[1], functor.morphisms[1]))
    assert "functor.identity" in rules(CategoryService.check_functor(broken))


def test_morphism_endpoints_must_match():
    functor = load_fixture("functor_arrow.json")
    per_2cls, per_pt = functor.objects
    wrong = CntMorphism(graph=frozenset({(0, 0), (1, 0), (2, 0)}), src=per_2cls, tar=per_pt)
    broken = dataclasses.replace(functor, objects=(per_2cls, Per(carrier=2, pairs=frozenset({(1, 1)}))))
    morphisms = (functor.morphisms[0], functor.morphisms[1], wrong)
    report = CategoryService.check_functor(dataclasses.replace(broken, morphisms=morphisms))
    assert {"functor.tar", "functor.identity"} <= rules(report)


def test_component_findings_name_the_inner_rule():
    functor = load_fixture("functor_f0.json")
    broken_per = Per(carrier=2, pairs=frozenset({(0, 1)}))
    broken = dataclasses.replace(functor, objects=(functor.objects[0], broken_per))
    report = CategoryService.check_functor(broken)
    component = [finding for finding in report.findings if finding.rule == "functor.component"]
    assert component and component[0].witness["rule"] == "per.symmetry"


def test_functor_must_be_monotone_on_objects():
    functor = load_fixture("functor_sierp.json")
    small, large = functor.objects
    flipped = FunctorInstance(
        category=functor.category,
        objects=(large, small),
        morphisms=(CntSetsService.identity_morphism(large), CntSetsService.identity_morphism(small)),
    )
    assert rules(CategoryService.check_functor(flipped)) == {"functor.continuity"}


@hypothesis.settings(max_examples=50, deadline=None)
@hypothesis.given(discrete_functors())
def test_generated_discrete_functors_are_valid(functor):
    assert CategoryService.check_functor(functor).ok


@hypothesis.settings(max_examples=50, deadline=None)
@hypothesis.given(st.data())
def test_generated_z2_and_arrow_functors_are_valid(data):
    z2_category = load_fixture("category_z2.json")
    arrow_category = load_fixture("category_arrow.json")
    assert CategoryService.check_functor(data.draw(z2_functors(z2_category))).ok
    assert CategoryService.check_functor(data.draw(arrow_functors(arrow_category))).ok


@pytest.mark.parametrize(
    "name",
    [
        "nattrans_collapse.json",
        "nattrans_identity_f1.json",
        "nattrans_swap_f1.json",
        "nattrans_z2_collapse.json",
    ],
)
def test_fixture_nat_trans_are_valid(name):
    assert CategoryService.check_nat_trans(load_fixture(name)).ok


def test_naturality_violation():
    transformation = load_fixture("nattrans_swap_f1.json")
    per = transformation.source.objects[0]
    collapse = CntMorphism(graph=graph_from_choice(per, per, [1, 1]), src=per, tar=per)
    report = CategoryService.check_nat_trans(dataclasses.replace(transformation, components=(collapse,)))
    assert rules(report) == {"nat.naturality"}
    assert report.findings[0].witness == {"f": 1}


def test_component_endpoints_must_match():
    transformation = load_fixture("nattrans_collapse.json")
    source = transformation.source
    components = (CntSetsService.identity_morphism(source.objects[0]), transformation.components[1])
    report = CategoryService.check_nat_trans(dataclasses.replace(transformation, components=components))
    assert rules(report) == {"nat.tar"}


def test_identity_nat_trans_is_valid():
    for name in ("functor_f0.json", "functor_f1.json", "functor_arrow.json", "functor_sierp.json"):
        assert CategoryService.check_nat_trans(CategoryService.identity_nat_trans(load_fixture(name))).ok


@hypothesis.settings(max_examples=50, deadline=None)
@hypothesis.given(discrete_functors(), st.data())
def test_any_family_over_a_discrete_category_is_natural(functor, data):
    per_choices = [
        data.draw(st.lists(st.integers(0, 3), min_size=len(per.classes), max_size=len(per.classes)))
        for per in functor.objects
    ]
    target_objects = tuple(Per(carrier=4, pairs=frozenset((i, i) for i in range(4))) for _ in functor.objects)
    target = FunctorInstance(
        category=functor.category,
        objects=target_objects,
        morphisms=tuple(CntSetsService.identity_morphism(per) for per in target_objects),
    )
    components = tuple(
        CntMorphism(graph=graph_from_choice(per, tar, choice), src=per, tar=tar)
        for per, tar, choice in zip(functor.objects, target_objects, per_choices)
    )
    transformation = NatTransInstance(source=functor, target=target, components=components)
    assert CategoryService.check_nat_trans(transformation).ok


def test_vertical_composition():
    collapse = load_fixture("nattrans_z2_collapse.json")
    swap = load_fixture("nattrans_swap_f1.json")
    composite = CategoryService.vertical_compose(collapse, swap)
    assert CategoryService.check_nat_trans(composite).ok
    assert CntSetsService.same_morphism(composite.components[0], collapse.components[0])

    twice = CategoryService.vertical_compose(swap, swap)
    identity = CategoryService.identity_nat_trans(swap.source)
    assert CntSetsService.same_morphism(twice.components[0], identity.components[0])

    unit = CategoryService.vertical_compose(identity, swap)
    assert CntSetsService.same_morphism(unit.components[0], swap.components[0])

    with pytest.raises(InputError):
        CategoryService.vertical_compose(swap, collapse)


def test_category_over_a_non_transitive_relation_is_rejected():
    broken = TransitiveRelation(carrier=3, pairs=frozenset({(0, 0), (1, 1), (2, 2), (0, 1), (1, 2)}))
    space = IdealSpaceService.whole_space(broken)
    assert space.points == (frozenset({0}), frozenset({0, 1}), frozenset({1, 2}))
    report = CategoryService.check_category(CategoryService.discrete_category(space))
    assert report.status == "violation"
    assert rules(report) == {"relation.transitivity", "space.point"}
    assert {finding.witness["space"] for finding in report.findings} == {"objects", "morphisms"}
