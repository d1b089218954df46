import logging
from typing import Dict, Iterable, List, Optional, Tuple

from ..models.errors import InputError
from ..models.models import (
    ActionInstance,
    Chart,
    CntMorphism,
    ComputableSpace,
    EquivariantMapInstance,
    EtaleInstance,
    FiberPoint,
    FunctorInstance,
    Ideal,
    IsoWitness,
    NatTransInstance,
    Per,
    TransitiveRelation,
)
from ..models.schemas import Finding, Report
from .category_service import CategoryService
from .cntsets_service import CntSetsService
from .etale_service import EtaleService
from .ideal_service import IdealSpaceService
from .kernel import Fuel, Verdict

logger = logging.getLogger(__name__)


class EquivalenceService:
    """関手 C → CntSets と C-集合の間の同値 𝓕 / 𝓖 と、その往復の検査"""

    @staticmethod
    def fiber_points(functor: FunctorInstance) -> Tuple[ComputableSpace, Tuple[FiberPoint, ...]]:
        """X_F の空間と、その点番号順に並べた ⟨c, [n]_c⟩ の列

        (c, S) ≤ (c′, S′) ⟺ c ⊆ c′ かつ S ⊆ S′ を関係として持つ。底空間が離散なら平坦になる。
        """
        base = functor.category.objects
        fibers = [FiberPoint(base=c, cls=cls) for c, per in enumerate(functor.objects) for cls in per.classes]
        pairs = frozenset(
            (i, j)
            for i, lower in enumerate(fibers)
            for j, upper in enumerate(fibers)
            if base.points[lower.base] <= base.points[upper.base] and lower.cls <= upper.cls
        )
        relation = TransitiveRelation(carrier=len(fibers), pairs=pairs)
        principal = [relation.predecessors[j] for j in range(len(fibers))]
        total = ComputableSpace(relation=relation, points=tuple(principal))
        ordered: List[Optional[FiberPoint]] = [None] * len(fibers)
        for j, point in enumerate(principal):
            ordered[total.index_of(point)] = fibers[j]
        return total, tuple(fiber for fiber in ordered if fiber is not None)

    @staticmethod
    def to_cset(functor: FunctorInstance) -> ActionInstance:
        """𝓕(F): ファイバー ⟨c, [n]_c⟩ の空間 X_F、チャート n ごとの切断、作用 α_F"""
        _require_ok(CategoryService.check_category(functor.category), "圏")
        _require_ok(CategoryService.check_functor(functor), "関手")

        category = functor.category
        base = category.objects
        total, fibers = EquivalenceService.fiber_points(functor)
        index: Dict[FiberPoint, int] = {fiber: x for x, fiber in enumerate(fibers)}

        width = max((per.carrier for per in functor.objects), default=0)
        charts = []
        for n in range(width):
            domain = {x for x, fiber in enumerate(fibers) if n in fiber.cls}
            image = {c for c, per in enumerate(functor.objects) if per.related(n, n)}
            section = {c: index[FiberPoint(base=c, cls=functor.objects[c].class_of(n))] for c in image}
            charts.append(
                Chart(
                    domain=IdealSpaceService.open_from_points(total, domain),
                    image=IdealSpaceService.open_from_points(base, image),
                    section=section,
                )
            )
        etale = EtaleInstance(
            total=total,
            base=base,
            projection=tuple(fiber.base for fiber in fibers),
            charts=tuple(charts),
        )

        action = {}
        for x, fiber in enumerate(fibers):
            for f in range(category.morphisms.size):
                if category.src[f] != fiber.base:
                    continue
                image = functor.morphisms[f].image_of(min(fiber.cls))
                action[(f, x)] = index[FiberPoint(base=category.tar[f], cls=image)]

        logger.debug("X_F を構成しました: 点 %d 個、チャート %d 個", total.size, len(charts))
        return ActionInstance(category=category, etale=etale, action=action)

    @staticmethod
    def to_functor(action: ActionInstance, fuel: Optional[Fuel] = None) -> FunctorInstance:
        """𝓖(X): 切断の一致を s_n(c) ∈ U_m の判定で求めて PER と射を作る"""
        _require_ok(EtaleService.check_cset(action, fuel), "C-集合")
        category, etale = action.category, action.etale
        width = len(etale.charts)
        charts = [EtaleService.chart_points(etale, n, fuel) for n in range(width)]

        objects = []
        for c in range(etale.base.size):
            through = [n for n in range(width) if c in charts[n][1]]
            pairs = frozenset(
                (n, m) for n in through for m in through if EtaleService.section_equality(etale, c, n, m, fuel)
            )
            objects.append(Per(carrier=width, pairs=pairs))

        morphisms = []
        for f in range(category.morphisms.size):
            source, target = category.src[f], category.tar[f]
            graph = set()
            for n in range(width):
                if source not in charts[n][1]:
                    continue
                moved = action.act(f, etale.charts[n].section[source])
                for m in range(width):
                    if target in charts[m][1] and _in_chart(etale, moved, m, fuel):
                        graph.add((n, m))
            morphisms.append(CntMorphism(graph=frozenset(graph), src=objects[source], tar=objects[target]))

        return FunctorInstance(category=category, objects=tuple(objects), morphisms=tuple(morphisms))

    @staticmethod
    def nat_to_equivariant(transformation: NatTransInstance) -> EquivariantMapInstance:
        """h(⟨c, [n]_c⟩) = ⟨c, η(c)(n)⟩"""
        _require_ok(CategoryService.check_nat_trans(transformation), "自然変換")
        source = EquivalenceService.to_cset(transformation.source)
        target = EquivalenceService.to_cset(transformation.target)
        _, source_fibers = EquivalenceService.fiber_points(transformation.source)
        _, target_fibers = EquivalenceService.fiber_points(transformation.target)
        target_index = {fiber: y for y, fiber in enumerate(target_fibers)}

        mapping = []
        for fiber in source_fibers:
            image = transformation.components[fiber.base].image_of(min(fiber.cls))
            mapping.append(target_index[FiberPoint(base=fiber.base, cls=image)])
        return EquivariantMapInstance(source=source, target=target, mapping=tuple(mapping))

    @staticmethod
    def equivariant_to_nat(mapping: EquivariantMapInstance, fuel: Optional[Fuel] = None) -> NatTransInstance:
        """η_h(c) = {(n, m) | c ∈ V_n ∩ V′_m かつ h(s_n(c)) ∈ U′_m}"""
        _require_ok(EtaleService.check_equivariant(mapping), "同変写像")
        source = EquivalenceService.to_functor(mapping.source, fuel)
        target = EquivalenceService.to_functor(mapping.target, fuel)
        before, after = mapping.source.etale, mapping.target.etale
        before_charts = [EtaleService.chart_points(before, n, fuel) for n in range(len(before.charts))]
        after_charts = [EtaleService.chart_points(after, m, fuel) for m in range(len(after.charts))]

        components = []
        for c in range(before.base.size):
            graph = set()
            for n, (_, image_points) in enumerate(before_charts):
                if c not in image_points:
                    continue
                moved = mapping.mapping[before.charts[n].section[c]]
                for m, (_, target_image_points) in enumerate(after_charts):
                    if c in target_image_points and _in_chart(after, moved, m, fuel):
                        graph.add((n, m))
            components.append(CntMorphism(graph=frozenset(graph), src=source.objects[c], tar=target.objects[c]))
        return NatTransInstance(source=source, target=target, components=tuple(components))

    @staticmethod
    def roundtrip_functor(functor: FunctorInstance) -> Report:
        """𝓖(𝓕(F)) = F を成分ごとに（射は飽和したグラフで）比べる"""
        recovered = EquivalenceService.to_functor(EquivalenceService.to_cset(functor))
        findings = []
        for c, (original, result) in enumerate(zip(functor.objects, recovered.objects)):
            if original != result:
                findings.append(
                    Finding(
                        rule="roundtrip.obj",
                        message=f"対象 {c} の PER が往復で一致しません",
                        witness={"c": c, "expected": sorted(original.pairs), "actual": sorted(result.pairs)},
                    )
                )
        for f, (original_mor, result_mor) in enumerate(zip(functor.morphisms, recovered.morphisms)):
            if not CntSetsService.same_morphism(original_mor, result_mor):
                findings.append(
                    Finding(
                        rule="roundtrip.mor",
                        message=f"射 {f} のグラフが往復で一致しません",
                        witness={
                            "f": f,
                            "expected": sorted(CntSetsService.saturate(original_mor).graph),
                            "actual": sorted(CntSetsService.saturate(result_mor).graph),
                        },
                    )
                )
        return Report.from_findings(findings, subject="roundtrip")

    @staticmethod
    def roundtrip_nat_trans(transformation: NatTransInstance) -> Report:
        recovered = EquivalenceService.equivariant_to_nat(EquivalenceService.nat_to_equivariant(transformation))
        findings = [
            Finding(
                rule="roundtrip.eta",
                message=f"η({c}) が往復で一致しません",
                witness={"c": c},
            )
            for c, (original, result) in enumerate(zip(transformation.components, recovered.components))
            if not CntSetsService.same_morphism(original, result)
        ]
        return Report.from_findings(findings, subject="roundtrip")

    @staticmethod
    def roundtrip_cset(
        action: ActionInstance,
        maps: Iterable[EquivariantMapInstance] = (),
        fuel: Optional[Fuel] = None,
    ) -> Tuple[IsoWitness, Report]:
        """θ: X → X_F と θ′: X_F → X を作り、互いに逆で同変であること、h について自然であることを調べる"""
        witness, rebuilt = _theta(action, fuel)
        findings: List[Finding] = []

        for x, image in enumerate(witness.theta):
            if witness.theta_inv[image] != x:
                findings.append(
                    Finding(
                        rule="roundtrip.theta-inverse",
                        message=f"θ′(θ({x})) = {witness.theta_inv[image]} ≠ {x} です",
                        witness={"x": x},
                    )
                )
        for y, image in enumerate(witness.theta_inv):
            if witness.theta[image] != y:
                findings.append(
                    Finding(
                        rule="roundtrip.theta-prime-inverse",
                        message=f"θ(θ′({y})) = {witness.theta[image]} ≠ {y} です",
                        witness={"y": y},
                    )
                )

        forward = EquivariantMapInstance(source=action, target=rebuilt, mapping=witness.theta)
        backward = EquivariantMapInstance(source=rebuilt, target=action, mapping=witness.theta_inv)
        for name, candidate in (("theta", forward), ("theta_inv", backward)):
            for finding in EtaleService.check_equivariant(candidate).findings:
                findings.append(
                    Finding(
                        rule="roundtrip.theta-equivariant",
                        message=f"{name}: {finding.message}",
                        witness={"map": name, "rule": finding.rule, **finding.witness},
                    )
                )

        for k, mapping in enumerate(maps):
            if mapping.source != action:
                raise InputError("同変写像の始域が検査する C-集合と一致しません")
            target_witness, _ = _theta(mapping.target, fuel)
            rebuilt_map = EquivalenceService.nat_to_equivariant(EquivalenceService.equivariant_to_nat(mapping, fuel))
            for x, hx in enumerate(mapping.mapping):
                left = target_witness.theta[hx]
                right = rebuilt_map.mapping[witness.theta[x]]
                if left != right:
                    findings.append(
                        Finding(
                            rule="roundtrip.naturality",
                            message=f"写像 {k} の点 {x} で θ_Y∘h と h′∘θ_X が一致しません",
                            witness={"map": k, "x": x, "left": left, "right": right},
                        )
                    )
        return witness, Report.from_findings(findings, subject="roundtrip")


def _theta(action: ActionInstance, fuel: Optional[Fuel]) -> Tuple[IsoWitness, ActionInstance]:
    # θ(x) = ⟨p(x), [n]_{p(x)}⟩（n は x を含む最小のチャート）、θ′(⟨c, [n]_c⟩) = s_{min [n]_c}(c)
    etale = action.etale
    functor = EquivalenceService.to_functor(action, fuel)
    rebuilt = EquivalenceService.to_cset(functor)
    _, fibers = EquivalenceService.fiber_points(functor)
    index = {fiber: y for y, fiber in enumerate(fibers)}

    theta = []
    for x in range(etale.total.size):
        c = etale.projection[x]
        n = EtaleService.locate_chart(etale, x, fuel)
        theta.append(index[FiberPoint(base=c, cls=functor.objects[c].class_of(n))])
    theta_inv = tuple(etale.charts[min(fiber.cls)].section[fiber.base] for fiber in fibers)
    return IsoWitness(theta=tuple(theta), theta_inv=theta_inv), rebuilt


def _in_chart(etale: EtaleInstance, x: int, n: int, fuel: Optional[Fuel]) -> bool:
    point = Ideal(over=etale.total.relation, elements=etale.total.points[x])
    return IdealSpaceService.open_member(point, etale.charts[n].domain, fuel) is Verdict.YES


def _require_ok(report: Report, label: str) -> None:
    if not report.ok:
        rules = sorted({finding.rule for finding in report.findings})
        raise InputError(f"{label}が正しくありません: {', '.join(rules)}")
