from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, FrozenSet, Mapping, Optional, Tuple

from ..services.kernel import CeSet, Enumeration
from .errors import DomainError, InputError

Pair = Tuple[int, int]


def canonical_key(elements: FrozenSet[int]) -> Tuple[int, ...]:
    """点の正準順序（要素集合の辞書式順序）"""
    return tuple(sorted(elements))


@dataclass(frozen=True)
class TransitiveRelation:
    """推移的関係 ≺ とそのイデアル空間の表示

    carrier が None のときは ℕ 上の関係で、pair_stream が対の符号を列挙する。
    """

    carrier: Optional[int]
    pairs: FrozenSet[Pair] = frozenset()
    pair_stream: Optional[CeSet] = None

    def __post_init__(self) -> None:
        if self.carrier is None:
            return
        if self.carrier < 0:
            raise InputError(f"台集合の大きさが負です: {self.carrier}")
        for a, b in self.pairs:
            if not (0 <= a < self.carrier and 0 <= b < self.carrier):
                raise InputError(f"関係の対 ({a}, {b}) が台集合 0..{self.carrier - 1} の外にあります")

    @property
    def is_finite(self) -> bool:
        return self.carrier is not None

    @cached_property
    def successors(self) -> Dict[int, FrozenSet[int]]:
        """a ↦ {c | a ≺ c}"""
        table: Dict[int, set] = {a: set() for a in range(self.carrier or 0)}
        for a, c in self.pairs:
            table[a].add(c)
        return {a: frozenset(cs) for a, cs in table.items()}

    @cached_property
    def predecessors(self) -> Dict[int, FrozenSet[int]]:
        """c ↦ {a | a ≺ c}"""
        table: Dict[int, set] = {c: set() for c in range(self.carrier or 0)}
        for a, c in self.pairs:
            table[c].add(a)
        return {c: frozenset(as_) for c, as_ in table.items()}

    def precedes(self, a: int, b: int) -> bool:
        return (a, b) in self.pairs


@dataclass(frozen=True)
class Ideal:
    """I_≺ の点。有限集合か列挙のどちらか一方で与える"""

    over: TransitiveRelation
    elements: Optional[FrozenSet[int]] = None
    stream: Optional[Enumeration] = None

    def __post_init__(self) -> None:
        if (self.elements is None) == (self.stream is None):
            raise InputError("イデアルは要素集合か列挙のどちらか一方で与えてください")

    @property
    def is_finite(self) -> bool:
        return self.elements is not None


@dataclass(frozen=True)
class CeOpen:
    """基本開集合 [a]_≺ の c.e. 和 ⋃_{a∈S} [a]_≺"""

    over: TransitiveRelation
    generators: CeSet


@dataclass(frozen=True)
class EnumOperator:
    """列挙作用素 f(I) = { b | ∃F ⊆ I, (F, b) ∈ graph }"""

    source: TransitiveRelation
    target: TransitiveRelation
    graph: FrozenSet[Tuple[FrozenSet[int], int]]


@dataclass(frozen=True)
class ComputableSpace:
    """計算可能位相空間 (≺, X)。X は I_≺ の点の有限リスト（正準順序）"""

    relation: TransitiveRelation
    points: Tuple[FrozenSet[int], ...]

    def __post_init__(self) -> None:
        if not self.relation.is_finite:
            raise InputError("有限の関係上の空間のみ点を列挙できます")
        carrier = self.relation.carrier or 0
        normalized = []
        for point in self.points:
            point = frozenset(point)
            if any(not 0 <= a < carrier for a in point):
                raise InputError(f"点 {sorted(point)} が台集合の外の要素を含みます")
            normalized.append(point)
        ordered = tuple(sorted(set(normalized), key=canonical_key))
        if len(ordered) != len(normalized):
            raise InputError("同じ点が重複して指定されています")
        object.__setattr__(self, "points", ordered)

    @property
    def size(self) -> int:
        return len(self.points)

    @cached_property
    def _index(self) -> Dict[FrozenSet[int], int]:
        return {point: index for index, point in enumerate(self.points)}

    def index_of(self, point: FrozenSet[int]) -> int:
        try:
            return self._index[frozenset(point)]
        except KeyError:
            raise InputError(f"{sorted(point)} はこの空間の点ではありません") from None


@dataclass(frozen=True)
class Per:
    """部分同値関係 ≡（対称かつ推移的な関係）。等号は対の集合だけで決まる"""

    carrier: int = field(compare=False)
    pairs: FrozenSet[Pair] = frozenset()

    def __post_init__(self) -> None:
        if self.carrier < 0:
            raise InputError(f"台集合の大きさが負です: {self.carrier}")
        for a, b in self.pairs:
            if not (0 <= a < self.carrier and 0 <= b < self.carrier):
                raise InputError(f"PER の対 ({a}, {b}) が台集合 0..{self.carrier - 1} の外にあります")

    @cached_property
    def domain(self) -> FrozenSet[int]:
        """{a | a ≡ a}"""
        return frozenset(a for a, b in self.pairs if a == b)

    def related(self, a: int, b: int) -> bool:
        return (a, b) in self.pairs

    def class_of(self, n: int) -> FrozenSet[int]:
        """[n] = {m | n ≡ m}"""
        return frozenset(m for a, m in self.pairs if a == n)

    @cached_property
    def classes(self) -> Tuple[FrozenSet[int], ...]:
        """同値類を最小代表元の順に並べたもの"""
        seen: Dict[FrozenSet[int], None] = {}
        for n in sorted(self.domain):
            seen.setdefault(self.class_of(n), None)
        return tuple(seen)


@dataclass(frozen=True)
class CntMorphism:
    """CntSets の射 ⟨G, ≡_src, ≡_tar⟩"""

    graph: FrozenSet[Pair]
    src: Per
    tar: Per

    def __post_init__(self) -> None:
        for a, b in self.graph:
            if not (0 <= a < self.src.carrier and 0 <= b < self.tar.carrier):
                raise InputError(f"グラフの対 ({a}, {b}) が始域・終域の台集合の外にあります")

    def image_of(self, n: int) -> FrozenSet[int]:
        """{m | G(n, m)}"""
        return frozenset(m for a, m in self.graph if a == n)


@dataclass(frozen=True)
class OvertDiscreteWitness:
    """overt 性の証拠 E_≺ と discrete 性の証拠 D_≺"""

    relation: TransitiveRelation
    overt: FrozenSet[int]
    discrete: FrozenSet[Pair]

    def __post_init__(self) -> None:
        carrier = self.relation.carrier
        if carrier is None:
            raise InputError("証拠は有限の関係に対してのみ扱えます")
        elements = set(self.overt) | {a for pair in self.discrete for a in pair}
        if any(not 0 <= a < carrier for a in elements):
            raise InputError("証拠集合が台集合の外の要素を含みます")


@dataclass(frozen=True)
class SpatializationResult:
    """I_≺ から復元した PER と、点の対応 g: I_≺ → I_≡, h: I_≡ → I_≺"""

    per: Per
    support: FrozenSet[int]
    g_map: Tuple[int, ...]
    h_map: Tuple[int, ...]


@dataclass(frozen=True)
class CategoryInstance:
    """有限の計算可能圏。射の合成は (g, f) ↦ g∘f の表で与える"""

    objects: ComputableSpace
    morphisms: ComputableSpace
    src: Tuple[int, ...]
    tar: Tuple[int, ...]
    identity: Tuple[int, ...]
    comp: Mapping[Pair, int]

    def __post_init__(self) -> None:
        n_obj, n_mor = self.objects.size, self.morphisms.size
        if len(self.src) != n_mor or len(self.tar) != n_mor:
            raise InputError(f"src/tar の表の長さが射の点の数 {n_mor} と一致しません")
        if len(self.identity) != n_obj:
            raise InputError(f"id の表の長さが対象の点の数 {n_obj} と一致しません")
        _check_range("src", self.src, n_obj)
        _check_range("tar", self.tar, n_obj)
        _check_range("id", self.identity, n_mor)
        for (g, f), h in self.comp.items():
            if not (0 <= g < n_mor and 0 <= f < n_mor and 0 <= h < n_mor):
                raise InputError(f"合成の表の項目 ({g}, {f}) ↦ {h} が射の点の範囲外です")
            if self.src[g] != self.tar[f]:
                raise DomainError(f"合成できない組 ({g}, {f}) が合成の表にあります")
        for pair in self.composable_pairs:
            if pair not in self.comp:
                raise DomainError(f"合成可能な組 {pair} が合成の表にありません")

    @property
    def composable_pairs(self) -> Tuple[Pair, ...]:
        """dom(∘) = {(g, f) | src(g) = tar(f)}"""
        n_mor = self.morphisms.size
        return tuple((g, f) for g in range(n_mor) for f in range(n_mor) if self.src[g] == self.tar[f])

    def compose(self, g: int, f: int) -> int:
        return self.comp[(g, f)]


@dataclass(frozen=True)
class FunctorInstance:
    """関手 C → CntSets（対象・射の表）"""

    category: CategoryInstance
    objects: Tuple[Per, ...]
    morphisms: Tuple[CntMorphism, ...]

    def __post_init__(self) -> None:
        if len(self.objects) != self.category.objects.size:
            raise InputError("関手の対象の表の長さが圏の対象の数と一致しません")
        if len(self.morphisms) != self.category.morphisms.size:
            raise InputError("関手の射の表の長さが圏の射の数と一致しません")


@dataclass(frozen=True)
class NatTransInstance:
    """自然変換 η: F → G（対象ごとの CntSets の射）"""

    source: FunctorInstance
    target: FunctorInstance
    components: Tuple[CntMorphism, ...]

    def __post_init__(self) -> None:
        if self.source.category != self.target.category:
            raise InputError("自然変換の両端の関手が同じ圏の上にありません")
        if len(self.components) != self.source.category.objects.size:
            raise InputError("自然変換の成分の数が圏の対象の数と一致しません")


@dataclass(frozen=True)
class Chart:
    """局所切断 s_n: V_n → U_n。section は V_n の点から U_n の点への表"""

    domain: CeOpen
    image: CeOpen
    section: Mapping[int, int]


@dataclass(frozen=True)
class EtaleInstance:
    """局所同相 p: X → Y と切断の族"""

    total: ComputableSpace
    base: ComputableSpace
    projection: Tuple[int, ...]
    charts: Tuple[Chart, ...]

    def __post_init__(self) -> None:
        if len(self.projection) != self.total.size:
            raise InputError("射影の表の長さが全空間の点の数と一致しません")
        _check_range("projection", self.projection, self.base.size)
        for n, chart in enumerate(self.charts):
            if chart.domain.over != self.total.relation or chart.image.over != self.base.relation:
                raise InputError(f"チャート {n} の開集合が全空間・底空間の関係の上にありません")
            for y, x in chart.section.items():
                if not (0 <= y < self.base.size and 0 <= x < self.total.size):
                    raise InputError(f"チャート {n} の切断の項目 {y} ↦ {x} が点の範囲外です")


@dataclass(frozen=True)
class ActionInstance:
    """圏 C の作用つきエタール空間（C-集合）。action は (f, x) ↦ f·x の表"""

    category: CategoryInstance
    etale: EtaleInstance
    action: Mapping[Pair, int]

    def __post_init__(self) -> None:
        if self.etale.base != self.category.objects:
            raise InputError("エタール空間の底空間が圏の対象の空間と一致しません")
        n_total = self.etale.total.size
        expected = set(self.domain)
        given = set(self.action)
        if given - expected:
            raise DomainError(f"作用の表に dom(α) の外の項目があります: {sorted(given - expected)[:5]}")
        if expected - given:
            raise DomainError(f"作用の表に dom(α) の項目が欠けています: {sorted(expected - given)[:5]}")
        for key, y in self.action.items():
            if not 0 <= y < n_total:
                raise InputError(f"作用の項目 {key} ↦ {y} が全空間の点の範囲外です")

    @property
    def domain(self) -> Tuple[Pair, ...]:
        """dom(α) = {(f, x) | src(f) = p(x)}"""
        category, etale = self.category, self.etale
        return tuple(
            (f, x)
            for f in range(category.morphisms.size)
            for x in range(etale.total.size)
            if category.src[f] == etale.projection[x]
        )

    def act(self, f: int, x: int) -> int:
        return self.action[(f, x)]


@dataclass(frozen=True)
class EquivariantMapInstance:
    """C-集合の間の同変写像"""

    source: ActionInstance
    target: ActionInstance
    mapping: Tuple[int, ...]

    def __post_init__(self) -> None:
        if self.source.category != self.target.category:
            raise InputError("同変写像の両端の C-集合が同じ圏の上にありません")
        if len(self.mapping) != self.source.etale.total.size:
            raise InputError("同変写像の表の長さが始域の点の数と一致しません")
        _check_range("map", self.mapping, self.target.etale.total.size)


@dataclass(frozen=True)
class FiberPoint:
    """X_F の点 ⟨c, [n]_c⟩"""

    base: int
    cls: FrozenSet[int]

    def __post_init__(self) -> None:
        if not self.cls:
            raise InputError("ファイバーの点の同値類が空です")


@dataclass(frozen=True)
class IsoWitness:
    """θ_X: X → X_F と θ′_X: X_F → X の表"""

    theta: Tuple[int, ...]
    theta_inv: Tuple[int, ...]


def _check_range(name: str, table: Tuple[int, ...], size: int) -> None:
    for index, value in enumerate(table):
        if not 0 <= value < size:
            raise InputError(f"{name} の表の {index} 番目の値 {value} が範囲 0..{size - 1} の外です")
