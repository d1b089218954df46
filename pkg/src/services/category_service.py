import logging
from typing import List, Union

from ..models.errors import InputError
from ..models.models import (
    CategoryInstance,
    CntMorphism,
    ComputableSpace,
    FunctorInstance,
    NatTransInstance,
    TransitiveRelation,
)
from ..models.schemas import Finding, Report
from .cntsets_service import CntSetsService
from .ideal_service import IdealSpaceService

logger = logging.getLogger(__name__)


class CategoryService:
    """有限の計算可能圏と、CntSets への関手・自然変換の検査"""

    @staticmethod
    def check_category(category: CategoryInstance) -> Report:
        """圏の法則（src/tar と合成・恒等射・結合律・単位律）と表の連続性を調べる"""
        src, tar, identity = category.src, category.tar, category.identity
        findings: List[Finding] = []

        for g, f in category.composable_pairs:
            h = category.compose(g, f)
            if src[h] != src[f]:
                findings.append(
                    Finding(
                        rule="category.src-comp",
                        message=f"src({g}∘{f}) = {src[h]} ですが src({f}) = {src[f]} です",
                        witness={"g": g, "f": f},
                    )
                )
            if tar[h] != tar[g]:
                findings.append(
                    Finding(
                        rule="category.tar-comp",
                        message=f"tar({g}∘{f}) = {tar[h]} ですが tar({g}) = {tar[g]} です",
                        witness={"g": g, "f": f},
                    )
                )

        for c, unit in enumerate(identity):
            if src[unit] != c:
                findings.append(
                    Finding(rule="category.id-src", message=f"src(id({c})) = {src[unit]} です", witness={"c": c})
                )
            if tar[unit] != c:
                findings.append(
                    Finding(rule="category.id-tar", message=f"tar(id({c})) = {tar[unit]} です", witness={"c": c})
                )

        comp = category.comp
        for g, f in category.composable_pairs:
            for h in range(category.morphisms.size):
                if src[h] != tar[g]:
                    continue
                # 両辺が表で定義されていない組は src-comp/tar-comp で報告済み
                inner_right = comp.get((h, g))
                inner_left = comp.get((g, f))
                if inner_right is None or inner_left is None:
                    continue
                left = comp.get((h, inner_left))
                right = comp.get((inner_right, f))
                if left is not None and right is not None and left != right:
                    findings.append(
                        Finding(
                            rule="category.assoc",
                            message=f"{h}∘({g}∘{f}) = {left} ですが ({h}∘{g})∘{f} = {right} です",
                            witness={"h": h, "g": g, "f": f},
                        )
                    )

        for f in range(category.morphisms.size):
            left = comp.get((identity[tar[f]], f))
            if left is not None and left != f:
                findings.append(
                    Finding(
                        rule="category.left-unit",
                        message=f"id(tar({f}))∘{f} = {left} です",
                        witness={"f": f},
                    )
                )
            right = comp.get((f, identity[src[f]]))
            if right is not None and right != f:
                findings.append(
                    Finding(
                        rule="category.right-unit",
                        message=f"{f}∘id(src({f})) = {right} です",
                        witness={"f": f},
                    )
                )

        findings.extend(CategoryService._continuity_findings(category))
        findings.extend(IdealSpaceService.check_space(category.objects, "objects"))
        findings.extend(IdealSpaceService.check_space(category.morphisms, "morphisms"))
        return Report.from_findings(findings, subject="category")

    @staticmethod
    def _continuity_findings(category: CategoryInstance) -> List[Finding]:
        objects, morphisms = category.objects, category.morphisms
        findings = []
        tables = (
            ("src", morphisms, objects, category.src),
            ("tar", morphisms, objects, category.tar),
            ("id", objects, morphisms, category.identity),
        )
        for name, source, target, table in tables:
            for i, j in IdealSpaceService.monotonicity_violations(source, target, dict(enumerate(table))):
                findings.append(
                    Finding(
                        rule="category.continuity",
                        message=f"{name} が特殊化順序 {i} ≤ {j} を保ちません",
                        witness={"table": name, "i": i, "j": j},
                    )
                )
        order = set(IdealSpaceService.specialization(morphisms))

        def below(i: int, j: int) -> bool:
            return i == j or (i, j) in order

        pairs = category.composable_pairs
        for g, f in pairs:
            for g2, f2 in pairs:
                if (g, f) != (g2, f2) and below(g, g2) and below(f, f2):
                    if not below(category.compose(g, f), category.compose(g2, f2)):
                        findings.append(
                            Finding(
                                rule="category.continuity",
                                message=f"合成が順序 ({g},{f}) ≤ ({g2},{f2}) を保ちません",
                                witness={"table": "comp", "lower": [g, f], "upper": [g2, f2]},
                            )
                        )
        return findings

    @staticmethod
    def discrete_category(space: Union[ComputableSpace, TransitiveRelation]) -> CategoryInstance:
        """空間 X を恒等射だけからなる圏 C_X とみなす"""
        if isinstance(space, TransitiveRelation):
            space = IdealSpaceService.whole_space(space)
        points = tuple(range(space.size))
        return CategoryInstance(
            objects=space,
            morphisms=space,
            src=points,
            tar=points,
            identity=points,
            comp={(i, i): i for i in points},
        )

    @staticmethod
    def check_functor(functor: FunctorInstance) -> Report:
        """関手の4条件（始域・終域・恒等射・合成の保存）と成分の正しさ・連続性を調べる"""
        category = functor.category
        findings: List[Finding] = []

        for c, per in enumerate(functor.objects):
            for finding in CntSetsService.check_per(per).findings:
                findings.append(_component_finding("functor.component", f"F_Obj({c})", finding, {"object": c}))
        for f, morphism in enumerate(functor.morphisms):
            for finding in CntSetsService.check_cnt_morphism(morphism).findings:
                findings.append(_component_finding("functor.component", f"F_Mor({f})", finding, {"morphism": f}))

        for f, morphism in enumerate(functor.morphisms):
            if morphism.src != functor.objects[category.src[f]]:
                findings.append(
                    Finding(
                        rule="functor.src",
                        message=f"F_Mor({f}) の始域が F_Obj(src({f})) と一致しません",
                        witness={"f": f},
                    )
                )
            if morphism.tar != functor.objects[category.tar[f]]:
                findings.append(
                    Finding(
                        rule="functor.tar",
                        message=f"F_Mor({f}) の終域が F_Obj(tar({f})) と一致しません",
                        witness={"f": f},
                    )
                )

        for c, unit in enumerate(category.identity):
            expected = CntSetsService.identity_morphism(functor.objects[c])
            if not CntSetsService.same_morphism(functor.morphisms[unit], expected):
                findings.append(
                    Finding(
                        rule="functor.identity",
                        message=f"F_Mor(id({c})) が F_Obj({c}) の恒等射ではありません",
                        witness={"c": c},
                    )
                )

        for g, f in category.composable_pairs:
            first, second = functor.morphisms[f], functor.morphisms[g]
            if first.tar != second.src:
                continue
            composite = CntSetsService.compose_cnt(second, first)
            if not CntSetsService.same_morphism(functor.morphisms[category.compose(g, f)], composite):
                findings.append(
                    Finding(
                        rule="functor.composition",
                        message=f"F_Mor({g}∘{f}) が F_Mor({g})∘F_Mor({f}) と一致しません",
                        witness={"g": g, "f": f},
                    )
                )

        for i, j in IdealSpaceService.specialization(category.objects):
            if not functor.objects[i].pairs <= functor.objects[j].pairs:
                findings.append(
                    Finding(
                        rule="functor.continuity",
                        message=f"F_Obj が順序 {i} ≤ {j} を保ちません",
                        witness={"table": "objects", "i": i, "j": j},
                    )
                )
        for i, j in IdealSpaceService.specialization(category.morphisms):
            lower, upper = functor.morphisms[i], functor.morphisms[j]
            if not _morphism_below(lower, upper):
                findings.append(
                    Finding(
                        rule="functor.continuity",
                        message=f"F_Mor が順序 {i} ≤ {j} を保ちません",
                        witness={"table": "morphisms", "i": i, "j": j},
                    )
                )
        return Report.from_findings(findings, subject="functor")

    @staticmethod
    def functors_equal(first: FunctorInstance, second: FunctorInstance) -> bool:
        """同じ圏の上で、対象は PER として、射は飽和したグラフとして等しい"""
        if first.category != second.category or first.objects != second.objects:
            return False
        return all(
            CntSetsService.same_morphism(m1, m2) for m1, m2 in zip(first.morphisms, second.morphisms)
        )

    @staticmethod
    def check_nat_trans(transformation: NatTransInstance) -> Report:
        """成分の始域・終域、自然性の四角形、成分の正しさ・連続性を調べる"""
        source, target = transformation.source, transformation.target
        category = source.category
        findings: List[Finding] = []

        for c, component in enumerate(transformation.components):
            for finding in CntSetsService.check_cnt_morphism(component).findings:
                findings.append(_component_finding("nat.component", f"η({c})", finding, {"object": c}))
            if component.src != source.objects[c]:
                findings.append(
                    Finding(rule="nat.src", message=f"η({c}) の始域が F_Obj({c}) と一致しません", witness={"c": c})
                )
            if component.tar != target.objects[c]:
                findings.append(
                    Finding(rule="nat.tar", message=f"η({c}) の終域が G_Obj({c}) と一致しません", witness={"c": c})
                )

        for f in range(category.morphisms.size):
            before = transformation.components[category.src[f]]
            after = transformation.components[category.tar[f]]
            source_mor, target_mor = source.morphisms[f], target.morphisms[f]
            if source_mor.tar != after.src or before.tar != target_mor.src:
                continue
            left = CntSetsService.compose_cnt(after, source_mor)
            right = CntSetsService.compose_cnt(target_mor, before)
            if not CntSetsService.same_morphism(left, right):
                findings.append(
                    Finding(
                        rule="nat.naturality",
                        message=f"射 {f} で η(tar)∘F_Mor と G_Mor∘η(src) が一致しません",
                        witness={"f": f},
                    )
                )

        for i, j in IdealSpaceService.specialization(category.objects):
            if not _morphism_below(transformation.components[i], transformation.components[j]):
                findings.append(
                    Finding(
                        rule="nat.continuity",
                        message=f"η が順序 {i} ≤ {j} を保ちません",
                        witness={"i": i, "j": j},
                    )
                )
        return Report.from_findings(findings, subject="nat-trans")

    @staticmethod
    def identity_nat_trans(functor: FunctorInstance) -> NatTransInstance:
        components = tuple(CntSetsService.identity_morphism(per) for per in functor.objects)
        return NatTransInstance(source=functor, target=functor, components=components)

    @staticmethod
    def vertical_compose(second: NatTransInstance, first: NatTransInstance) -> NatTransInstance:
        """(second·first)(c) = second(c) ∘ first(c)"""
        if not CategoryService.functors_equal(first.target, second.source):
            raise InputError("縦合成する自然変換の間の関手が一致しません")
        components = tuple(
            CntSetsService.compose_cnt(outer, inner) for outer, inner in zip(second.components, first.components)
        )
        logger.debug("自然変換を縦合成しました（成分 %d 個）", len(components))
        return NatTransInstance(source=first.source, target=second.target, components=components)


def _morphism_below(lower: CntMorphism, upper: CntMorphism) -> bool:
    # P(ℕ×ℕ) の包含順序で三つ組を比べる
    return (
        lower.src.pairs <= upper.src.pairs
        and lower.tar.pairs <= upper.tar.pairs
        and CntSetsService.saturate(lower).graph <= CntSetsService.saturate(upper).graph
    )


def _component_finding(rule: str, label: str, inner: Finding, witness: dict) -> Finding:
    return Finding(
        rule=rule,
        message=f"{label}: {inner.message}",
        witness={**witness, "rule": inner.rule, **inner.witness},
    )
