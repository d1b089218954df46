import logging
from typing import List, Optional, Tuple

from ..models.errors import InputError, PreconditionError
from ..models.models import (
    ActionInstance,
    EquivariantMapInstance,
    EtaleInstance,
    Ideal,
)
from ..models.schemas import Finding, Report
from .category_service import CategoryService
from .ideal_service import IdealSpaceService
from .kernel import Fuel, Verdict

logger = logging.getLogger(__name__)


class EtaleService:
    """エタール空間・切断・作用・同変写像の検査"""

    @staticmethod
    def chart_points(
        etale: EtaleInstance, n: int, fuel: Optional[Fuel] = None
    ) -> Tuple[frozenset, frozenset]:
        """チャート n の (U_n の点, V_n の点)"""
        chart = etale.charts[n]
        return (
            IdealSpaceService.open_points(etale.total, chart.domain, fuel),
            IdealSpaceService.open_points(etale.base, chart.image, fuel),
        )

    @staticmethod
    def check_etale(etale: EtaleInstance, fuel: Optional[Fuel] = None) -> Report:
        """チャートによる被覆と、切断が p の制限の逆写像であることを調べる"""
        projection = etale.projection
        findings: List[Finding] = []
        covered = set()

        for n, chart in enumerate(etale.charts):
            domain_points, image_points = EtaleService.chart_points(etale, n, fuel)
            covered |= domain_points
            section = chart.section

            keys = set(section)
            for y in sorted(image_points - keys):
                findings.append(
                    Finding(
                        rule="etale.section-domain",
                        message=f"チャート {n} の切断が V_{n} の点 {y} で定義されていません",
                        witness={"n": n, "y": y},
                    )
                )
            for y in sorted(keys - image_points):
                findings.append(
                    Finding(
                        rule="etale.section-domain",
                        message=f"チャート {n} の切断が V_{n} の外の点 {y} で定義されています",
                        witness={"n": n, "y": y},
                    )
                )

            for y in sorted(keys & image_points):
                x = section[y]
                if x not in domain_points:
                    findings.append(
                        Finding(
                            rule="etale.section-range",
                            message=f"s_{n}({y}) = {x} が U_{n} に入っていません",
                            witness={"n": n, "y": y, "x": x},
                        )
                    )
                if projection[x] != y:
                    findings.append(
                        Finding(
                            rule="etale.section-right",
                            message=f"p(s_{n}({y})) = {projection[x]} ≠ {y} です",
                            witness={"n": n, "y": y, "x": x},
                        )
                    )

            for x in sorted(domain_points):
                y = projection[x]
                if y not in image_points or section.get(y) != x:
                    findings.append(
                        Finding(
                            rule="etale.section-left",
                            message=f"点 {x} ∈ U_{n} について s_{n}(p({x})) = {x} が成り立ちません",
                            witness={"n": n, "x": x, "y": y},
                        )
                    )

            for i, j in IdealSpaceService.monotonicity_violations(etale.base, etale.total, section):
                findings.append(
                    Finding(
                        rule="etale.continuity",
                        message=f"切断 s_{n} が順序 {i} ≤ {j} を保ちません",
                        witness={"table": f"section{n}", "i": i, "j": j},
                    )
                )

        for x in range(etale.total.size):
            if x not in covered:
                findings.append(
                    Finding(
                        rule="etale.cover",
                        message=f"点 {x} を含むチャートがありません",
                        witness={"x": x},
                    )
                )

        for i, j in IdealSpaceService.monotonicity_violations(etale.total, etale.base, dict(enumerate(projection))):
            findings.append(
                Finding(
                    rule="etale.continuity",
                    message=f"射影 p が順序 {i} ≤ {j} を保ちません",
                    witness={"table": "projection", "i": i, "j": j},
                )
            )
        findings.extend(IdealSpaceService.check_space(etale.total, "total"))
        findings.extend(IdealSpaceService.check_space(etale.base, "base"))
        return Report.from_findings(findings, subject="etale")

    @staticmethod
    def locate_chart(etale: EtaleInstance, x: int, fuel: Optional[Fuel] = None) -> int:
        """x ∈ U_n となる最小の n"""
        point = Ideal(over=etale.total.relation, elements=etale.total.points[x])
        for n, chart in enumerate(etale.charts):
            if IdealSpaceService.open_member(point, chart.domain, fuel) is Verdict.YES:
                return n
        raise PreconditionError(f"点 {x} を含むチャートがありません")

    @staticmethod
    def section_equality(etale: EtaleInstance, y: int, n: int, m: int, fuel: Optional[Fuel] = None) -> bool:
        """s_n(y) = s_m(y) かを s_n(y) ∈ U_m で判定し、点の直接比較と照合する"""
        base_point = Ideal(over=etale.base.relation, elements=etale.base.points[y])
        for index in (n, m):
            if IdealSpaceService.open_member(base_point, etale.charts[index].image, fuel) is not Verdict.YES:
                raise PreconditionError(f"点 {y} は V_{index} に含まれていません")
        x = etale.charts[n].section[y]
        lifted = Ideal(over=etale.total.relation, elements=etale.total.points[x])
        by_open = IdealSpaceService.open_member(lifted, etale.charts[m].domain, fuel) is Verdict.YES
        direct = x == etale.charts[m].section.get(y)
        if by_open != direct:
            raise InputError(f"点 {y} でチャート {n}, {m} の切断の比較が開集合による判定と一致しません")
        return by_open

    @staticmethod
    def check_action(action: ActionInstance) -> Report:
        """作用の3条件（ファイバーの移動・恒等射・合成）と連続性を調べる"""
        category, etale = action.category, action.etale
        projection = etale.projection
        findings: List[Finding] = []

        for f, x in action.domain:
            y = action.act(f, x)
            if projection[y] != category.tar[f]:
                findings.append(
                    Finding(
                        rule="action.cond1",
                        message=f"p({f}·{x}) = {projection[y]} ですが tar({f}) = {category.tar[f]} です",
                        witness={"f": f, "x": x},
                    )
                )

        for x in range(etale.total.size):
            # src(id(c)) ≠ c の圏では (id, x) が dom(α) にないので圏の検査に任せる
            acted = action.action.get((category.identity[projection[x]], x))
            if acted is not None and acted != x:
                findings.append(
                    Finding(
                        rule="action.cond2",
                        message=f"id(p({x}))·{x} = {acted} ≠ {x} です",
                        witness={"x": x},
                    )
                )

        for g, f in category.composable_pairs:
            for x in range(etale.total.size):
                if category.src[f] != projection[x]:
                    continue
                moved = action.action.get((g, action.act(f, x)))
                if moved is None:
                    continue
                composite = action.action.get((category.compose(g, f), x))
                if composite is not None and composite != moved:
                    findings.append(
                        Finding(
                            rule="action.cond3",
                            message=f"({g}∘{f})·{x} = {composite} ですが {g}·({f}·{x}) = {moved} です",
                            witness={"g": g, "f": f, "x": x},
                        )
                    )

        morphism_order = set(IdealSpaceService.specialization(category.morphisms))
        total_order = set(IdealSpaceService.specialization(etale.total))
        for f, x in action.domain:
            for f2, x2 in action.domain:
                if (f, x) == (f2, x2):
                    continue
                if (f == f2 or (f, f2) in morphism_order) and (x == x2 or (x, x2) in total_order):
                    lower, upper = action.act(f, x), action.act(f2, x2)
                    if lower != upper and (lower, upper) not in total_order:
                        findings.append(
                            Finding(
                                rule="action.continuity",
                                message=f"作用が順序 ({f},{x}) ≤ ({f2},{x2}) を保ちません",
                                witness={"lower": [f, x], "upper": [f2, x2]},
                            )
                        )
        return Report.from_findings(findings, subject="action")

    @staticmethod
    def check_cset(action: ActionInstance, fuel: Optional[Fuel] = None) -> Report:
        """C-集合を圏・エタール空間・作用の順にまとめて調べる"""
        report = CategoryService.check_category(action.category)
        report = report.merged(EtaleService.check_etale(action.etale, fuel), EtaleService.check_action(action))
        return Report(status=report.status, subject="cset", findings=report.findings)

    @staticmethod
    def check_equivariant(mapping: EquivariantMapInstance) -> Report:
        """ファイバーの保存 p = q∘h、作用との可換性 h(f·x) = f·h(x)、連続性を調べる"""
        source, target, table = mapping.source, mapping.target, mapping.mapping
        findings: List[Finding] = []

        for x, hx in enumerate(table):
            if source.etale.projection[x] != target.etale.projection[hx]:
                findings.append(
                    Finding(
                        rule="equivariant.fiber",
                        message=f"p({x}) = {source.etale.projection[x]} ですが q(h({x})) = "
                        f"{target.etale.projection[hx]} です",
                        witness={"x": x},
                    )
                )

        for f, x in source.domain:
            acted = target.action.get((f, table[x]))
            if acted is None:
                continue
            if table[source.act(f, x)] != acted:
                findings.append(
                    Finding(
                        rule="equivariant.action",
                        message=f"h({f}·{x}) = {table[source.act(f, x)]} ですが {f}·h({x}) = {acted} です",
                        witness={"f": f, "x": x},
                    )
                )

        violations = IdealSpaceService.monotonicity_violations(
            source.etale.total, target.etale.total, dict(enumerate(table))
        )
        for i, j in violations:
            findings.append(
                Finding(
                    rule="equivariant.continuity",
                    message=f"h が順序 {i} ≤ {j} を保ちません",
                    witness={"i": i, "j": j},
                )
            )
        return Report.from_findings(findings, subject="equivariant")

    @staticmethod
    def identity_map(action: ActionInstance) -> EquivariantMapInstance:
        return EquivariantMapInstance(
            source=action, target=action, mapping=tuple(range(action.etale.total.size))
        )
