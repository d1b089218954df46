import logging
from typing import Dict, FrozenSet, List, Tuple

from ..models.errors import InputError, WitnessInvalidError
from ..models.models import (
    CntMorphism,
    EnumOperator,
    OvertDiscreteWitness,
    Per,
    SpatializationResult,
    TransitiveRelation,
)
from ..models.schemas import Finding, Report
from .ideal_service import IdealSpaceService

logger = logging.getLogger(__name__)


class CntSetsService:
    """PER の圏 CntSets と、空間化関手 𝓔 およびその逆向きの構成"""

    @staticmethod
    def check_per(per: Per) -> Report:
        """対称律・推移律の違反を列挙する"""
        findings = []
        for a, b in sorted(per.pairs):
            if not per.related(b, a):
                findings.append(
                    Finding(
                        rule="per.symmetry",
                        message=f"{a}≡{b} ですが {b}≡{a} がありません",
                        witness={"a": a, "b": b},
                    )
                )
        for a, b in sorted(per.pairs):
            for c in sorted(per.class_of(b)):
                if not per.related(a, c):
                    findings.append(
                        Finding(
                            rule="per.transitivity",
                            message=f"{a}≡{b} かつ {b}≡{c} ですが {a}≡{c} がありません",
                            witness={"a": a, "b": b, "c": c},
                        )
                    )
        return Report.from_findings(findings, subject="per")

    @staticmethod
    def check_cnt_morphism(morphism: CntMorphism) -> Report:
        """射の5条件（定義域・始域での不変性・終域での不変性・一価性・全域性）を調べる"""
        src, tar, graph = morphism.src, morphism.tar, morphism.graph
        findings: List[Finding] = []
        for a, b in sorted(graph):
            if not (src.related(a, a) and tar.related(b, b)):
                findings.append(
                    Finding(
                        rule="cnt.cond1",
                        message=f"G({a},{b}) ですが {a}≡{a} または {b}≡{b} が成り立ちません",
                        witness={"a": a, "b": b},
                    )
                )
            for a2 in sorted(src.class_of(a)):
                if (a2, b) not in graph:
                    findings.append(
                        Finding(
                            rule="cnt.cond2",
                            message=f"G({a},{b}) かつ {a}≡{a2} ですが G({a2},{b}) がありません",
                            witness={"a": a, "b": b, "a_prime": a2},
                        )
                    )
            for b2 in sorted(tar.class_of(b)):
                if (a, b2) not in graph:
                    findings.append(
                        Finding(
                            rule="cnt.cond3",
                            message=f"G({a},{b}) かつ {b}≡{b2} ですが G({a},{b2}) がありません",
                            witness={"a": a, "b": b, "b_prime": b2},
                        )
                    )
            for b2 in sorted(morphism.image_of(a)):
                if not tar.related(b, b2):
                    findings.append(
                        Finding(
                            rule="cnt.cond4",
                            message=f"G({a},{b}) かつ G({a},{b2}) ですが {b}≡{b2} ではありません",
                            witness={"a": a, "b": b, "b_prime": b2},
                        )
                    )
        for a in sorted(src.domain):
            if not morphism.image_of(a):
                findings.append(
                    Finding(
                        rule="cnt.cond5",
                        message=f"{a}≡{a} ですが G({a},b) となる b がありません",
                        witness={"a": a},
                    )
                )
        report = Report.from_findings(findings, subject="cnt-morphism")
        return report.merged(CntSetsService.check_per(src), CntSetsService.check_per(tar))

    @staticmethod
    def saturate(morphism: CntMorphism) -> CntMorphism:
        """グラフを条件2・3について閉じる。正しい射どうしはこの形で比べる"""
        graph = frozenset(
            (a2, b2)
            for a, b in morphism.graph
            for a2 in morphism.src.class_of(a)
            for b2 in morphism.tar.class_of(b)
        )
        return CntMorphism(graph=graph, src=morphism.src, tar=morphism.tar)

    @staticmethod
    def same_morphism(first: CntMorphism, second: CntMorphism) -> bool:
        if first.src != second.src or first.tar != second.tar:
            return False
        return CntSetsService.saturate(first).graph == CntSetsService.saturate(second).graph

    @staticmethod
    def identity_morphism(per: Per) -> CntMorphism:
        """id(≡) = ⟨≡, ≡, ≡⟩"""
        return CntMorphism(graph=per.pairs, src=per, tar=per)

    @staticmethod
    def compose_cnt(second: CntMorphism, first: CntMorphism) -> CntMorphism:
        """second ∘ first = {(a, c) | ∃b: G1(a, b) かつ G2(b, c)}"""
        if first.tar != second.src:
            raise InputError("合成する射の終域と始域の PER が一致しません")
        graph = frozenset((a, c) for a, b in first.graph for c in second.image_of(b))
        return CntMorphism(graph=graph, src=first.src, tar=second.tar)

    @staticmethod
    def e_obj(per: Per) -> TransitiveRelation:
        """PER をそのまま推移的関係とみなす。イデアルは同値類で、空間は離散になる"""
        return TransitiveRelation(carrier=per.carrier, pairs=per.pairs)

    @staticmethod
    def e_mor(morphism: CntMorphism) -> EnumOperator:
        """f_G(I) = {b | ∃a ∈ I: G(a, b)} を実現する列挙作用素"""
        graph = frozenset((frozenset({a}), b) for a, b in morphism.graph)
        return EnumOperator(
            source=CntSetsService.e_obj(morphism.src),
            target=CntSetsService.e_obj(morphism.tar),
            graph=graph,
        )

    @staticmethod
    def point_function(morphism: CntMorphism) -> Tuple[int, ...]:
        """e_mor が誘導する点の写像（同値類の番号から同値類の番号へ）"""
        operator = CntSetsService.e_mor(morphism)
        target_index = {cls: index for index, cls in enumerate(morphism.tar.classes)}
        table = []
        for cls in morphism.src.classes:
            image = IdealSpaceService.apply_operator(operator, IdealSpaceService.make_ideal(operator.source, cls))
            table.append(target_index[image.elements or frozenset()])
        return tuple(table)

    @staticmethod
    def canonical_witness(per: Per) -> OvertDiscreteWitness:
        """e_obj(≡) の証拠 E = {a | a≡a}, D = ≡"""
        return OvertDiscreteWitness(relation=CntSetsService.e_obj(per), overt=per.domain, discrete=per.pairs)

    @staticmethod
    def check_witness(witness: OvertDiscreteWitness) -> Report:
        """E と D が overt 性・discrete 性の証拠になっているかを総当たりで調べる"""
        relation = witness.relation
        ideals = [ideal.elements or frozenset() for ideal in IdealSpaceService.enumerate_ideals(relation)]
        findings: List[Finding] = []

        inhabited = frozenset().union(*ideals)
        for a in range(relation.carrier or 0):
            if (a in witness.overt) != (a in inhabited):
                findings.append(
                    Finding(
                        rule="witness.overt",
                        message=f"要素 {a} について「E に属する」と「あるイデアルが含む」が一致しません",
                        witness={"a": a, "in_overt": a in witness.overt},
                    )
                )

        for i, first in enumerate(ideals):
            for j, second in enumerate(ideals):
                witnessed = any(a in first and b in second for a, b in witness.discrete)
                if witnessed != (i == j):
                    findings.append(
                        Finding(
                            rule="witness.discrete",
                            message=f"点 {i} と {j} の等しさを D が正しく表していません",
                            witness={"i": i, "j": j, "witnessed": witnessed},
                        )
                    )

        for a, b in sorted(witness.discrete):
            if a not in witness.overt or b not in witness.overt:
                findings.append(
                    Finding(
                        rule="witness.support",
                        message=f"D の対 ({a}, {b}) の要素が E に含まれていません",
                        witness={"a": a, "b": b},
                    )
                )
        return Report.from_findings(findings, subject="witness")

    @staticmethod
    def spatialize(witness: OvertDiscreteWitness) -> SpatializationResult:
        """overt かつ discrete な I_≺ から PER ≡ を復元し、点の対応 g, h を作る"""
        report = CntSetsService.check_witness(witness)
        if not report.ok:
            raise WitnessInvalidError("overt/discrete の証拠が条件を満たしていません", report=report)

        relation = witness.relation
        successors = relation.successors
        support = frozenset(
            c
            for c in witness.overt
            if any(relation.precedes(a, c) and relation.precedes(b, c) for a, b in witness.discrete)
        )
        pairs = frozenset(
            (a, b)
            for a in support
            for b in support
            if successors[a] & successors[b] & support
        )
        per = Per(carrier=relation.carrier or 0, pairs=pairs)

        space_points = [ideal.elements or frozenset() for ideal in IdealSpaceService.enumerate_ideals(relation)]
        per_points = [
            ideal.elements or frozenset() for ideal in IdealSpaceService.enumerate_ideals(CntSetsService.e_obj(per))
        ]
        space_index: Dict[FrozenSet[int], int] = {point: i for i, point in enumerate(space_points)}
        per_index: Dict[FrozenSet[int], int] = {point: j for j, point in enumerate(per_points)}

        g_map = []
        for point in space_points:
            image = frozenset(a for a in point if per.related(a, a))
            if image not in per_index:
                raise WitnessInvalidError(f"g({sorted(point)}) = {sorted(image)} が ≡ の同値類になりません")
            g_map.append(per_index[image])
        # h(J) は J の下閉包。S の要素だけに制限すると下に閉じないことがある
        h_map = []
        for point in per_points:
            image = frozenset(b for b in range(relation.carrier or 0) if successors[b] & point)
            if image not in space_index:
                raise WitnessInvalidError(f"h({sorted(point)}) = {sorted(image)} が ≺ のイデアルになりません")
            h_map.append(space_index[image])

        logger.debug("空間化: 点 %d 個、同値類 %d 個", len(space_points), len(per_points))
        return SpatializationResult(per=per, support=support, g_map=tuple(g_map), h_map=tuple(h_map))
