import dataclasses

import pytest

from src.models.errors import InputError
from src.models.models import Chart, OvertDiscreteWitness, TransitiveRelation
from src.services.ideal_service import IdealSpaceService
from src.services.law_service import LawService

from .conftest import load_fixture


def rules(report):
    return {finding.rule for finding in report.findings}


@pytest.mark.parametrize(
    "name",
    [
        "rel_point.json",
        "rel_sierp.json",
        "rel_flat3.json",
        "rel_powerset4.json",
        "per_2cls.json",
        "per_empty.json",
        "morphism_collapse.json",
        "morphism_swap.json",
        "witness_flat2.json",
        "witness_2cls.json",
        "category_z2.json",
        "category_arrow.json",
        "functor_f0.json",
        "functor_f1.json",
        "functor_arrow.json",
        "nattrans_collapse.json",
        "nattrans_swap_f1.json",
        "etale_identity.json",
        "etale_identity_dup.json",
        "etale_sierp_identity.json",
        "cset_z2_redundant.json",
        "cset_arrow.json",
        "equivariant_redundant.json",
        "equivariant_collapse.json",
    ],
)
def test_laws_hold_on_fixtures(name):
    report = LawService.run_laws(load_fixture(name))
    assert report.ok, report.findings
    assert report.subject == "laws"


def test_invalid_witness_reports_its_findings():
    relation = TransitiveRelation(carrier=2, pairs=frozenset({(0, 0), (0, 1), (1, 1)}))
    witness = OvertDiscreteWitness(relation=relation, overt=frozenset({0, 1}), discrete=frozenset({(0, 0)}))
    assert "witness.discrete" in rules(LawService.run_laws(witness))


def test_section_membership_detects_a_section_outside_its_chart():
    etale = load_fixture("etale_identity_dup.json")
    flat2 = etale.total.relation
    narrowed = Chart(domain=IdealSpaceService.basic_open(flat2, 0), image=etale.charts[1].image, section={0: 0, 1: 1})
    report = LawService.run_laws(dataclasses.replace(etale, charts=(etale.charts[0], narrowed)))
    assert "laws.section-membership" in rules(report)


def test_unsupported_instance():
    with pytest.raises(InputError):
        LawService.run_laws("not an instance")
