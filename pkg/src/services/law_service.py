import logging
from functools import partial
from typing import Callable, Dict, List, Optional, Tuple

from ..models.errors import InputError, WitnessInvalidError
from ..models.models import (
    ActionInstance,
    CategoryInstance,
    CntMorphism,
    EquivariantMapInstance,
    EtaleInstance,
    FunctorInstance,
    Ideal,
    NatTransInstance,
    OvertDiscreteWitness,
    Per,
    TransitiveRelation,
)
from ..models.schemas import Finding, Report
from .category_service import CategoryService
from .cntsets_service import CntSetsService
from .equivalence_service import EquivalenceService
from .etale_service import EtaleService
from .ideal_service import IdealSpaceService
from .kernel import Fuel, Verdict

logger = logging.getLogger(__name__)


class LawService:
    """正しいインスタンスについて、構成が満たすべき性質をまとめて確かめる"""

    @staticmethod
    def run_laws(instance: object, fuel: Optional[Fuel] = None) -> Report:
        handlers: Dict[type, Callable[..., List[Finding]]] = {
            TransitiveRelation: LawService._relation_laws,
            Per: LawService._per_laws,
            CntMorphism: LawService._morphism_laws,
            OvertDiscreteWitness: LawService._witness_laws,
            CategoryInstance: LawService._category_laws,
            FunctorInstance: LawService._functor_laws,
            NatTransInstance: LawService._nat_trans_laws,
            EtaleInstance: partial(LawService._etale_laws, fuel=fuel),
            ActionInstance: partial(LawService._cset_laws, fuel=fuel),
            EquivariantMapInstance: partial(LawService._equivariant_laws, fuel=fuel),
        }
        handler = handlers.get(type(instance))
        if handler is None:
            raise InputError(f"法則の検査に対応していない種類です: {type(instance).__name__}")
        findings = handler(instance)
        logger.debug("法則の検査: %s で %d 件の違反", type(instance).__name__, len(findings))
        return Report.from_findings(findings, subject="laws")

    @staticmethod
    def _relation_laws(relation: TransitiveRelation) -> List[Finding]:
        listed = [ideal.elements for ideal in IdealSpaceService.enumerate_ideals(relation)]
        swept = IdealSpaceService.sweep_ideals(relation)
        if listed == swept:
            return []
        return [
            Finding(
                rule="laws.ideal-oracle",
                message="単項イデアルの列挙と全部分集合の走査の結果が一致しません",
                witness={"listed": [sorted(p or ()) for p in listed], "swept": [sorted(p) for p in swept]},
            )
        ]

    @staticmethod
    def _per_laws(per: Per) -> List[Finding]:
        findings = []
        ideals = IdealSpaceService.enumerate_ideals(CntSetsService.e_obj(per))
        points = [ideal.elements or frozenset() for ideal in ideals]
        for i, first in enumerate(points):
            for j in range(i + 1, len(points)):
                if first & points[j]:
                    findings.append(
                        Finding(
                            rule="laws.discrete",
                            message=f"e_obj の点 {i} と {j} が交わっています",
                            witness={"i": i, "j": j},
                        )
                    )
        if len(points) != len(per.classes):
            findings.append(
                Finding(
                    rule="laws.class-count",
                    message=f"e_obj の点の数 {len(points)} が同値類の数 {len(per.classes)} と一致しません",
                    witness={"points": len(points), "classes": len(per.classes)},
                )
            )
        result = CntSetsService.spatialize(CntSetsService.canonical_witness(per))
        if len(result.per.classes) != len(per.classes):
            findings.append(
                Finding(
                    rule="laws.spatialize",
                    message="標準の証拠から復元した PER の同値類の数が元と一致しません",
                    witness={"recovered": len(result.per.classes), "original": len(per.classes)},
                )
            )
        findings.extend(_inverse_findings(result.g_map, result.h_map))
        return findings

    @staticmethod
    def _morphism_laws(morphism: CntMorphism) -> List[Finding]:
        findings = []
        left = CntSetsService.compose_cnt(CntSetsService.identity_morphism(morphism.tar), morphism)
        right = CntSetsService.compose_cnt(morphism, CntSetsService.identity_morphism(morphism.src))
        for rule, composite in (("laws.left-unit", left), ("laws.right-unit", right)):
            if not CntSetsService.same_morphism(composite, morphism):
                findings.append(Finding(rule=rule, message="恒等射との合成が元の射と一致しません"))

        identity = CntSetsService.point_function(CntSetsService.identity_morphism(morphism.src))
        if identity != tuple(range(len(morphism.src.classes))):
            findings.append(Finding(rule="laws.e-identity", message="e_mor が恒等射を保ちません"))
        if morphism.src == morphism.tar:
            twice = CntSetsService.point_function(CntSetsService.compose_cnt(morphism, morphism))
            once = CntSetsService.point_function(morphism)
            if twice != tuple(once[i] for i in once):
                findings.append(
                    Finding(rule="laws.e-composition", message="e_mor(m∘m) が e_mor(m)∘e_mor(m) と一致しません")
                )
        return findings

    @staticmethod
    def _witness_laws(witness: OvertDiscreteWitness) -> List[Finding]:
        try:
            result = CntSetsService.spatialize(witness)
        except WitnessInvalidError as e:
            return list(e.report.findings) if e.report else [Finding(rule="laws.spatialize", message=str(e))]
        return _inverse_findings(result.g_map, result.h_map)

    @staticmethod
    def _category_laws(category: CategoryInstance) -> List[Finding]:
        findings = []
        for label, space in (("objects", category.objects), ("morphisms", category.morphisms)):
            report = CategoryService.check_category(CategoryService.discrete_category(space))
            if not report.ok:
                findings.append(
                    Finding(
                        rule="laws.discrete-category",
                        message=f"{label} の空間の離散圏が圏の法則を満たしません",
                        witness={"space": label, "rules": sorted({f.rule for f in report.findings})},
                    )
                )
        return findings

    @staticmethod
    def _functor_laws(functor: FunctorInstance) -> List[Finding]:
        category = functor.category
        findings = []
        tables = [CntSetsService.point_function(morphism) for morphism in functor.morphisms]
        for c, unit in enumerate(category.identity):
            if tables[unit] != tuple(range(len(functor.objects[c].classes))):
                findings.append(
                    Finding(
                        rule="laws.e-identity",
                        message=f"e_mor(F_Mor(id({c}))) が恒等写像ではありません",
                        witness={"c": c},
                    )
                )
        for g, f in category.composable_pairs:
            composite = tables[category.compose(g, f)]
            expected = tuple(tables[g][i] for i in tables[f])
            if composite != expected:
                findings.append(
                    Finding(
                        rule="laws.e-composition",
                        message=f"e_mor(F_Mor({g}∘{f})) が e_mor の合成と一致しません",
                        witness={"g": g, "f": f},
                    )
                )
        return findings

    @staticmethod
    def _nat_trans_laws(transformation: NatTransInstance) -> List[Finding]:
        findings = []
        before = CategoryService.identity_nat_trans(transformation.source)
        after = CategoryService.identity_nat_trans(transformation.target)
        for rule, composite in (
            ("laws.nat-right-unit", CategoryService.vertical_compose(transformation, before)),
            ("laws.nat-left-unit", CategoryService.vertical_compose(after, transformation)),
        ):
            for c, (expected, actual) in enumerate(zip(transformation.components, composite.components)):
                if not CntSetsService.same_morphism(expected, actual):
                    findings.append(
                        Finding(rule=rule, message=f"恒等変換との縦合成が成分 {c} で一致しません", witness={"c": c})
                    )
        return findings

    @staticmethod
    def _etale_laws(etale: EtaleInstance, fuel: Optional[Fuel]) -> List[Finding]:
        findings = []
        charts = [EtaleService.chart_points(etale, n, fuel) for n in range(len(etale.charts))]
        for x in range(etale.total.size):
            y = etale.projection[x]
            point = Ideal(over=etale.total.relation, elements=etale.total.points[x])
            through = []
            for n, (_, image_points) in enumerate(charts):
                if y not in image_points:
                    continue
                is_section = etale.charts[n].section.get(y) == x
                in_domain = IdealSpaceService.open_member(point, etale.charts[n].domain, fuel) is Verdict.YES
                if is_section != in_domain:
                    findings.append(
                        Finding(
                            rule="laws.section-membership",
                            message=f"点 {x} とチャート {n} で x = s_n(y) と x ∈ U_n が一致しません",
                            witness={"x": x, "n": n},
                        )
                    )
                if in_domain:
                    through.append(n)
            for n in through:
                for m in through:
                    if not EtaleService.section_equality(etale, y, n, m, fuel):
                        findings.append(
                            Finding(
                                rule="laws.chart-agreement",
                                message=f"点 {x} を通るチャート {n}, {m} の切断が一致しません",
                                witness={"x": x, "n": n, "m": m},
                            )
                        )
        return findings

    @staticmethod
    def _cset_laws(action: ActionInstance, fuel: Optional[Fuel]) -> List[Finding]:
        findings = LawService._etale_laws(action.etale, fuel)
        report = EtaleService.check_equivariant(EtaleService.identity_map(action))
        if not report.ok:
            findings.append(Finding(rule="laws.identity-map", message="恒等写像が同変になりません"))
        return findings

    @staticmethod
    def _equivariant_laws(mapping: EquivariantMapInstance, fuel: Optional[Fuel]) -> List[Finding]:
        transformation = EquivalenceService.equivariant_to_nat(mapping, fuel)
        report = CategoryService.check_nat_trans(transformation)
        return [
            Finding(
                rule="laws.translation",
                message=f"同変写像から作った自然変換が正しくありません: {finding.message}",
                witness={"rule": finding.rule},
            )
            for finding in report.findings
        ]


def _inverse_findings(g_map: Tuple[int, ...], h_map: Tuple[int, ...]) -> List[Finding]:
    findings = []
    for i, j in enumerate(g_map):
        if h_map[j] != i:
            findings.append(
                Finding(rule="laws.spatialize", message=f"h(g({i})) ≠ {i} です", witness={"point": i})
            )
    for j, i in enumerate(h_map):
        if g_map[i] != j:
            findings.append(
                Finding(rule="laws.spatialize", message=f"g(h({j})) ≠ {j} です", witness={"point": j})
            )
    return findings
