import itertools
import logging
from collections import defaultdict
from functools import lru_cache
from typing import AbstractSet, Dict, FrozenSet, Iterable, List, Mapping, Optional, Tuple

import networkx as nx

from .. import config
from ..models.errors import CapacityError, InputError, OperatorInvalidError
from ..models.models import (
    CeOpen,
    ComputableSpace,
    EnumOperator,
    Ideal,
    Pair,
    TransitiveRelation,
    canonical_key,
)
from ..models.schemas import Finding, Report
from .kernel import (
    PASS,
    CeSet,
    Enumeration,
    EnumerationFactory,
    FiniteEnumeration,
    Fuel,
    StreamEnumeration,
    Verdict,
    dovetail,
    pair,
    set_decode,
)

logger = logging.getLogger(__name__)


class IdealSpaceService:
    """イデアル空間 I_≺ とその点・開集合・計算可能関数を扱うサービス"""

    @staticmethod
    def check_relation(relation: TransitiveRelation) -> Report:
        """推移律の違反をすべて列挙する"""
        _require_finite(relation)
        findings = []
        successors = relation.successors
        for a, b in sorted(relation.pairs):
            for c in sorted(successors[b]):
                if not relation.precedes(a, c):
                    findings.append(
                        Finding(
                            rule="relation.transitivity",
                            message=f"{a}≺{b} かつ {b}≺{c} ですが {a}≺{c} がありません",
                            witness={"a": a, "b": b, "c": c},
                        )
                    )
        return Report.from_findings(findings, subject="relation")

    @staticmethod
    def check_space(space: ComputableSpace, name: str) -> List[Finding]:
        """空間の関係の推移律と、各点がイデアルであることを調べる。witness には space=name を付ける"""
        findings = [
            Finding(
                rule=finding.rule,
                message=f"{name}: {finding.message}",
                witness={"space": name, **finding.witness},
            )
            for finding in IdealSpaceService.check_relation(space.relation).findings
        ]
        for i, point in enumerate(space.points):
            if not IdealSpaceService.is_ideal(space.relation, point):
                findings.append(
                    Finding(
                        rule="space.point",
                        message=f"{name}: 点 {i} = {sorted(point)} はイデアルではありません",
                        witness={"space": name, "point": i},
                    )
                )
        return findings

    @staticmethod
    def transitive_closure(relation: TransitiveRelation) -> TransitiveRelation:
        """推移閉包を取る（反射的な対は閉路から生じるものだけを加える）"""
        _require_finite(relation)
        graph = nx.DiGraph()
        graph.add_nodes_from(range(relation.carrier or 0))
        graph.add_edges_from(relation.pairs)
        closure = nx.transitive_closure(graph, reflexive=False)
        return TransitiveRelation(carrier=relation.carrier, pairs=frozenset(closure.edges()))

    @staticmethod
    def is_ideal(relation: TransitiveRelation, elements: AbstractSet[int]) -> bool:
        """空でない・下に閉じている・有向である、の3条件を直接調べる"""
        _require_finite(relation)
        _require_within_carrier(relation, elements)
        if not elements:
            return False
        # 下に閉じている
        for a in elements:
            if not relation.predecessors[a] <= elements:
                return False
        # 有向である
        successors = relation.successors
        for a, b in itertools.combinations_with_replacement(sorted(elements), 2):
            if not (successors[a] & successors[b] & elements):
                return False
        return True

    @staticmethod
    def sweep_ideals(relation: TransitiveRelation, bound: Optional[int] = None) -> List[FrozenSet[int]]:
        """全部分集合を調べてイデアルを列挙する（総当たりの参照実装）"""
        _require_capacity(relation, bound)
        carrier = relation.carrier or 0
        found = []
        for mask in range(1, 1 << carrier):
            subset = set_decode(mask)
            if IdealSpaceService.is_ideal(relation, subset):
                found.append(subset)
        return sorted(found, key=canonical_key)

    @staticmethod
    def enumerate_ideals(relation: TransitiveRelation, bound: Optional[int] = None) -> List[Ideal]:
        """I_≺ の全ての点を正準順序で返す。この順序が点の番号になる"""
        _require_capacity(relation, bound)
        return [Ideal(over=relation, elements=elements) for elements in _principal_ideals(relation)]

    @staticmethod
    def whole_space(relation: TransitiveRelation, bound: Optional[int] = None) -> ComputableSpace:
        ideals = IdealSpaceService.enumerate_ideals(relation, bound)
        return ComputableSpace(relation=relation, points=tuple(ideal.elements for ideal in ideals if ideal.elements))

    @staticmethod
    def subspace(relation: TransitiveRelation, points: Iterable[AbstractSet[int]]) -> ComputableSpace:
        """点を明示した部分空間。各点がイデアルであることを確かめる"""
        point_list = [frozenset(point) for point in points]
        for point in point_list:
            if not IdealSpaceService.is_ideal(relation, point):
                raise InputError(f"{sorted(point)} は関係のイデアルではありません")
        return ComputableSpace(relation=relation, points=tuple(point_list))

    @staticmethod
    def make_ideal(relation: TransitiveRelation, elements: AbstractSet[int]) -> Ideal:
        if not IdealSpaceService.is_ideal(relation, elements):
            raise InputError(f"{sorted(elements)} は関係のイデアルではありません")
        return Ideal(over=relation, elements=frozenset(elements))

    @staticmethod
    def basic_open(relation: TransitiveRelation, *generators: int) -> CeOpen:
        """[a]_≺ の和"""
        return CeOpen(over=relation, generators=CeSet.of(generators))

    @staticmethod
    def open_member(ideal: Ideal, open_set: CeOpen, fuel: Optional[Fuel] = None) -> Verdict:
        """I ∈ U かを調べる。有限の場合は正確に、そうでなければ fuel の範囲で探索する"""
        if ideal.over != open_set.over:
            raise InputError("イデアルと開集合が異なる関係の上にあります")
        generators = open_set.generators.finite_items
        if ideal.elements is not None and generators is not None:
            return Verdict.YES if generators & ideal.elements else Verdict.NO

        fuel = fuel or Fuel(config.DEFAULT_FUEL)
        ideal_enumeration = ideal.stream or FiniteEnumeration(items=tuple(sorted(ideal.elements or ())))
        search = dovetail([open_set.generators.enumeration, ideal_enumeration])
        seen: Tuple[set, set] = (set(), set())
        for step in range(fuel.max_steps):
            if search.length is not None and step >= search.length:
                return Verdict.NO
            item = search.at(step)
            if item is PASS:
                continue
            index, value = item
            seen[index].add(value)
            if value in seen[1 - index]:
                return Verdict.YES
        if search.length is not None and fuel.max_steps >= search.length:
            return Verdict.NO
        return Verdict.UNKNOWN

    @staticmethod
    def open_points(space: ComputableSpace, open_set: CeOpen, fuel: Optional[Fuel] = None) -> FrozenSet[int]:
        """空間の点のうち開集合に属するものの番号"""
        return frozenset(
            index
            for index, point in enumerate(space.points)
            if IdealSpaceService.open_member(Ideal(over=space.relation, elements=point), open_set, fuel)
            is Verdict.YES
        )

    @staticmethod
    def open_from_points(space: ComputableSpace, indices: AbstractSet[int]) -> CeOpen:
        """点の集合を生成元で表した c.e. 開集合にする（開集合でなければ入力エラー）"""
        chosen = frozenset(indices)
        generators = set()
        for index in chosen:
            for a in space.points[index]:
                covered = {j for j, point in enumerate(space.points) if a in point}
                if covered <= chosen:
                    generators.add(a)
        open_set = CeOpen(over=space.relation, generators=CeSet.of(generators))
        if IdealSpaceService.open_points(space, open_set) != chosen:
            raise InputError(f"点の集合 {sorted(chosen)} は開集合ではありません（上に閉じていません）")
        return open_set

    @staticmethod
    def specialization(space: ComputableSpace) -> List[Pair]:
        """特殊化順序 i ≤ j（点の包含）の組。有限空間ではこの順序を保つことが連続性"""
        return [
            (i, j)
            for i, lower in enumerate(space.points)
            for j, upper in enumerate(space.points)
            if i != j and lower <= upper
        ]

    @staticmethod
    def monotonicity_violations(
        source: ComputableSpace, target: ComputableSpace, table: Mapping[int, int]
    ) -> List[Pair]:
        """i ≤ j なのに table[i] ≤ table[j] とならない組（表にない点は飛ばす）"""
        return [
            (i, j)
            for i, j in IdealSpaceService.specialization(source)
            if i in table
            and j in table
            and not target.points[table[i]] <= target.points[table[j]]
        ]

    @staticmethod
    def apply_operator(operator: EnumOperator, ideal: Ideal) -> Ideal:
        """f(I) を計算する。有限の点では正確に、列挙の点では列挙として返す"""
        if ideal.over != operator.source:
            raise InputError("作用素の始域とイデアルの関係が一致しません")
        if ideal.elements is not None:
            image = frozenset(b for needed, b in operator.graph if needed <= ideal.elements)
            if operator.target.is_finite and not IdealSpaceService.is_ideal(operator.target, image):
                raise OperatorInvalidError(f"f({sorted(ideal.elements)}) = {sorted(image)} はイデアルではありません")
            return Ideal(over=operator.target, elements=image)

        entries = sorted(operator.graph, key=lambda entry: (canonical_key(entry[0]), entry[1]))
        if not entries or ideal.stream is None:
            return Ideal(over=operator.target, stream=EnumerationFactory.empty())
        prefix = _StreamPrefix(ideal.stream)
        source_length = ideal.stream.length

        # ステップ k はソースのステップ k // len(entries) までしか問い合わせない
        def step(k: int) -> Optional[int]:
            rounds, position = divmod(k, len(entries))
            needed, b = entries[position]
            return b if prefix.covers(needed, rounds) else PASS

        length = None if source_length is None else source_length * len(entries)
        return Ideal(over=operator.target, stream=StreamEnumeration(step_fn=step, length=length))

    @staticmethod
    def compose_operators(second: EnumOperator, first: EnumOperator) -> EnumOperator:
        """second ∘ first のグラフを構成する"""
        if first.target != second.source:
            raise InputError("合成する作用素の終域と始域が一致しません")
        witnesses: Dict[int, List[FrozenSet[int]]] = defaultdict(list)
        for needed, b in first.graph:
            witnesses[b].append(needed)
        graph = set()
        for needed, c in second.graph:
            choices = [witnesses.get(h, []) for h in sorted(needed)]
            for combination in itertools.product(*choices):
                graph.add((frozenset().union(*combination), c))
        return EnumOperator(source=first.source, target=second.target, graph=frozenset(graph))

    @staticmethod
    def identity_operator(relation: TransitiveRelation) -> EnumOperator:
        _require_finite(relation)
        graph = frozenset((frozenset({a}), a) for a in range(relation.carrier or 0))
        return EnumOperator(source=relation, target=relation, graph=graph)

    @staticmethod
    def constant_operator(
        source: TransitiveRelation, target: TransitiveRelation, elements: AbstractSet[int]
    ) -> EnumOperator:
        """全ての点を target の点 elements に送る作用素"""
        graph = frozenset((frozenset(), b) for b in elements)
        return EnumOperator(source=source, target=target, graph=graph)

    @staticmethod
    def product_relation(first: TransitiveRelation, second: TransitiveRelation) -> TransitiveRelation:
        """(a, a′) ≺ (b, b′) ⟺ a ≺₁ b かつ a′ ≺₂ b′。要素は Cantor の対符号"""
        _require_finite(first)
        _require_finite(second)
        c1, c2 = first.carrier or 0, second.carrier or 0
        carrier = pair(c1 - 1, c2 - 1) + 1 if c1 and c2 else 0
        pairs = frozenset(
            (pair(a, a2), pair(b, b2)) for a, b in first.pairs for a2, b2 in second.pairs
        )
        return TransitiveRelation(carrier=carrier, pairs=pairs)

    @staticmethod
    def product_projections(
        first: TransitiveRelation, second: TransitiveRelation
    ) -> Tuple[EnumOperator, EnumOperator]:
        product = IdealSpaceService.product_relation(first, second)
        c1, c2 = first.carrier or 0, second.carrier or 0
        codes = [(a, a2, pair(a, a2)) for a in range(c1) for a2 in range(c2)]
        left = frozenset((frozenset({code}), a) for a, _, code in codes)
        right = frozenset((frozenset({code}), a2) for _, a2, code in codes)
        return (
            EnumOperator(source=product, target=first, graph=left),
            EnumOperator(source=product, target=second, graph=right),
        )

    @staticmethod
    def pair_ideal(first: Ideal, second: Ideal) -> Ideal:
        if first.elements is None or second.elements is None:
            raise InputError("積の点は有限のイデアルからのみ作れます")
        product = IdealSpaceService.product_relation(first.over, second.over)
        elements = frozenset(pair(a, b) for a in first.elements for b in second.elements)
        return Ideal(over=product, elements=elements)

    @staticmethod
    def powerset_relation(width: int) -> TransitiveRelation:
        """符号 0..2^width−1 上の i ≺ j ⟺ F_i ⊆ F_j（P({0..width−1}) の表示）"""
        size = 1 << width
        pairs = frozenset((i, j) for i in range(size) for j in range(size) if set_decode(i) <= set_decode(j))
        return TransitiveRelation(carrier=size, pairs=pairs)


@lru_cache(maxsize=1024)
def _principal_ideals(relation: TransitiveRelation) -> Tuple[FrozenSet[int], ...]:
    # 有限の有向集合は全要素の上界を含むので、イデアルは t≺t なる t の {a | a≺t} に限る
    ideals = {
        relation.predecessors[t] for t in range(relation.carrier or 0) if relation.precedes(t, t)
    }
    logger.debug("イデアルを %d 個列挙しました（台集合 %s）", len(ideals), relation.carrier)
    return tuple(sorted(ideals, key=canonical_key))


def _require_finite(relation: TransitiveRelation) -> None:
    if not relation.is_finite:
        raise InputError("この操作には有限の関係が必要です")


def _require_capacity(relation: TransitiveRelation, bound: Optional[int]) -> None:
    _require_finite(relation)
    limit = config.CARRIER_BOUND if bound is None else bound
    if (relation.carrier or 0) > limit:
        raise CapacityError(f"台集合の大きさ {relation.carrier} が上限 {limit} を超えています")


def _require_within_carrier(relation: TransitiveRelation, elements: AbstractSet[int]) -> None:
    carrier = relation.carrier or 0
    outside = sorted(a for a in elements if not 0 <= a < carrier)
    if outside:
        raise InputError(f"要素 {outside} が台集合 0..{carrier - 1} の外にあります")


class _StreamPrefix:
    """ソース列挙の問い合わせ結果を先頭から順に保持する（各ステップは一度だけ問い合わせる）"""

    def __init__(self, stream: Enumeration):
        self.stream = stream
        self.queried = 0
        self.first_step: Dict[int, int] = {}

    def covers(self, needed: FrozenSet[int], rounds: int) -> bool:
        """ステップ 0..rounds の出力が needed を全て含むか"""
        while self.queried <= rounds:
            item = self.stream.at(self.queried)
            if item is not PASS:
                self.first_step.setdefault(item, self.queried)
            self.queried += 1
        return all(self.first_step.get(a, rounds + 1) <= rounds for a in needed)
