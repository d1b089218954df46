import logging
from typing import Any, Optional

from ..models.errors import InputError
from ..models.models import (
    ActionInstance,
    CategoryInstance,
    CntMorphism,
    EquivariantMapInstance,
    EtaleInstance,
    FunctorInstance,
    NatTransInstance,
    OvertDiscreteWitness,
    Per,
    TransitiveRelation,
)
from ..models.schemas import Report
from .category_service import CategoryService
from .cntsets_service import CntSetsService
from .equivalence_service import EquivalenceService
from .etale_service import EtaleService
from .ideal_service import IdealSpaceService
from .instance_service import InstanceService
from .kernel import Fuel

logger = logging.getLogger(__name__)

ROUNDTRIP_KINDS = ("functor", "nat-trans", "cset", "equivariant")


class CheckService:
    """インスタンスの種類に応じて検査・往復検査を振り分ける"""

    @staticmethod
    def check(instance: Any, fuel: Optional[Fuel] = None) -> Report:
        """インスタンスとその構成要素の法則をすべて検査する"""
        kind = InstanceService.kind_of(instance)
        if isinstance(instance, TransitiveRelation):
            report = IdealSpaceService.check_relation(instance)
        elif isinstance(instance, Per):
            report = CntSetsService.check_per(instance)
        elif isinstance(instance, CntMorphism):
            report = CntSetsService.check_cnt_morphism(instance)
        elif isinstance(instance, OvertDiscreteWitness):
            report = IdealSpaceService.check_relation(instance.relation)
            if report.ok:
                report = CntSetsService.check_witness(instance)
        elif isinstance(instance, CategoryInstance):
            report = CategoryService.check_category(instance)
        elif isinstance(instance, FunctorInstance):
            report = CategoryService.check_category(instance.category).merged(CategoryService.check_functor(instance))
        elif isinstance(instance, NatTransInstance):
            report = CategoryService.check_category(instance.source.category).merged(
                CategoryService.check_functor(instance.source),
                CategoryService.check_functor(instance.target),
                CategoryService.check_nat_trans(instance),
            )
        elif isinstance(instance, EtaleInstance):
            report = EtaleService.check_etale(instance, fuel)
        elif isinstance(instance, ActionInstance):
            report = EtaleService.check_cset(instance, fuel)
        elif isinstance(instance, EquivariantMapInstance):
            report = EtaleService.check_cset(instance.source, fuel).merged(
                EtaleService.check_cset(instance.target, fuel),
                EtaleService.check_equivariant(instance),
            )
        else:
            raise InputError(f"検査に対応していない種類です: {kind}")
        return Report(status=report.status, subject=kind, findings=report.findings)

    @staticmethod
    def roundtrip(instance: Any, fuel: Optional[Fuel] = None) -> Report:
        """関手・自然変換・C-集合・同変写像について、同値の往復が元に戻ることを確かめる"""
        kind = InstanceService.kind_of(instance)
        if kind not in ROUNDTRIP_KINDS:
            raise InputError(f"往復検査に対応していない種類です: {kind}")
        if isinstance(instance, FunctorInstance):
            return EquivalenceService.roundtrip_functor(instance)
        if isinstance(instance, NatTransInstance):
            return EquivalenceService.roundtrip_nat_trans(instance)
        if isinstance(instance, ActionInstance):
            witness, report = EquivalenceService.roundtrip_cset(instance, fuel=fuel)
        else:
            witness, report = EquivalenceService.roundtrip_cset(instance.source, maps=[instance], fuel=fuel)
        logger.debug("θ = %s, θ′ = %s", witness.theta, witness.theta_inv)
        return report.with_data({"theta": list(witness.theta), "theta_inv": list(witness.theta_inv)})
