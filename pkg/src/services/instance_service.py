import json
import logging
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Tuple, Type, TypeVar, Union

from pydantic import BaseModel, TypeAdapter, ValidationError

from ..models.errors import InputError
from ..models.models import (
    ActionInstance,
    CategoryInstance,
    CeOpen,
    Chart,
    CntMorphism,
    ComputableSpace,
    EquivariantMapInstance,
    EtaleInstance,
    FunctorInstance,
    NatTransInstance,
    OvertDiscreteWitness,
    Per,
    TransitiveRelation,
)
from ..models.schemas import (
    CategoryDocument,
    ChartBody,
    CntMorphismDocument,
    CsetDocument,
    EquivariantDocument,
    EtaleDocument,
    FunctorDocument,
    GraphBody,
    InstanceDocument,
    NatTransDocument,
    PerDocument,
    RelationDocument,
    SpaceBody,
    WitnessDocument,
)
from .ideal_service import IdealSpaceService
from .kernel import CeSet

logger = logging.getLogger(__name__)

DocumentT = TypeVar("DocumentT", bound=BaseModel)

_document_adapter: TypeAdapter = TypeAdapter(InstanceDocument)

KIND_OF: Dict[type, str] = {
    TransitiveRelation: "relation",
    Per: "per",
    CntMorphism: "cnt-morphism",
    OvertDiscreteWitness: "witness",
    CategoryInstance: "category",
    FunctorInstance: "functor",
    NatTransInstance: "nat-trans",
    EtaleInstance: "etale",
    ActionInstance: "cset",
    EquivariantMapInstance: "equivariant",
}


class InstanceService:
    """インスタンスファイル（JSON）の読み込みと書き出し"""

    @staticmethod
    def load(path: Union[str, Path], closure: bool = False) -> Any:
        """ファイルを読み、参照を解決してインスタンスに変換する"""
        loader = _Loader(closure=closure)
        return loader.instance(loader.read(Path(path)), Path(path).parent)

    @staticmethod
    def kind_of(instance: Any) -> str:
        try:
            return KIND_OF[type(instance)]
        except KeyError:
            raise InputError(f"インスタンスの種類がわかりません: {type(instance).__name__}") from None

    @staticmethod
    def to_document(instance: Any) -> BaseModel:
        """参照を含まない自己完結した文書に変換する"""
        kind = InstanceService.kind_of(instance)
        if kind == "relation":
            return _relation_document(instance)
        if kind == "per":
            return _per_document(instance)
        if kind == "cnt-morphism":
            return CntMorphismDocument(
                graph=sorted(instance.graph), src=_per_document(instance.src), tar=_per_document(instance.tar)
            )
        if kind == "witness":
            return WitnessDocument(
                relation=_relation_document(instance.relation),
                overt=sorted(instance.overt),
                discrete=sorted(instance.discrete),
            )
        if kind == "category":
            return _category_document(instance)
        if kind == "functor":
            return _functor_document(instance)
        if kind == "nat-trans":
            return NatTransDocument(
                source=_functor_document(instance.source),
                target=_functor_document(instance.target),
                components=[
                    _graph_body(component, instance.source.objects[c], instance.target.objects[c])
                    for c, component in enumerate(instance.components)
                ],
            )
        if kind == "etale":
            return _etale_document(instance, with_base=True)
        if kind == "cset":
            return _cset_document(instance)
        return EquivariantDocument(
            source=_cset_document(instance.source),
            target=_cset_document(instance.target),
            map=list(instance.mapping),
        )

    @staticmethod
    def payload(instance: Any) -> Dict[str, Any]:
        return InstanceService.to_document(instance).model_dump(mode="json", exclude_none=True)

    @staticmethod
    def dumps(instance: Any) -> str:
        payload = InstanceService.payload(instance)
        return json.dumps(payload, sort_keys=True, indent=2, ensure_ascii=False) + "\n"

    @staticmethod
    def write(instance: Any, path: Union[str, Path]) -> None:
        Path(path).write_text(InstanceService.dumps(instance), encoding="utf-8")
        logger.info("インスタンスを書き出しました: %s", path)


class _Loader:
    """相対パスの参照を、参照元ファイルのディレクトリを起点に解決する"""

    def __init__(self, closure: bool):
        self.closure = closure
        self.cache: Dict[Path, BaseModel] = {}

    def read(self, path: Path) -> BaseModel:
        resolved = path.resolve()
        if resolved in self.cache:
            return self.cache[resolved]
        try:
            raw = json.loads(resolved.read_text(encoding="utf-8"))
        except FileNotFoundError:
            raise InputError(f"ファイルが見つかりません: {path}") from None
        except json.JSONDecodeError as e:
            raise InputError(f"JSON として読めません: {path}: {e}") from e
        try:
            document = _document_adapter.validate_python(raw)
        except ValidationError as e:
            raise InputError(f"インスタンスの形式が正しくありません: {path}: {e}") from e
        self.cache[resolved] = document
        return document

    def resolve(
        self, reference: Union[str, DocumentT], expected: Type[DocumentT], base: Path
    ) -> Tuple[DocumentT, Path]:
        if not isinstance(reference, str):
            return reference, base
        path = base / reference
        document = self.read(path)
        if not isinstance(document, expected):
            raise InputError(f"{reference} の種類が {expected.model_fields['kind'].default} ではありません")
        return document, path.parent

    def instance(self, document: BaseModel, base: Path) -> Any:
        if isinstance(document, RelationDocument):
            return self.relation(document, base)
        if isinstance(document, PerDocument):
            return self.per(document, base)
        if isinstance(document, CntMorphismDocument):
            return CntMorphism(
                graph=frozenset(map(tuple, document.graph)),
                src=self.per(document.src, base),
                tar=self.per(document.tar, base),
            )
        if isinstance(document, WitnessDocument):
            return OvertDiscreteWitness(
                relation=self.relation(document.relation, base),
                overt=frozenset(document.overt),
                discrete=frozenset(map(tuple, document.discrete)),
            )
        if isinstance(document, CategoryDocument):
            return self.category(document, base)
        if isinstance(document, FunctorDocument):
            return self.functor(document, base)
        if isinstance(document, NatTransDocument):
            return self.nat_trans(document, base)
        if isinstance(document, EtaleDocument):
            return self.etale(document, base, None)
        if isinstance(document, CsetDocument):
            return self.cset(document, base)
        if isinstance(document, EquivariantDocument):
            return self.equivariant(document, base)
        raise InputError(f"未知の種類のインスタンスです: {type(document).__name__}")

    def relation(self, reference: Union[str, RelationDocument], base: Path) -> TransitiveRelation:
        document, _ = self.resolve(reference, RelationDocument, base)
        relation = TransitiveRelation(carrier=document.carrier, pairs=frozenset(map(tuple, document.pairs)))
        if self.closure:
            relation = IdealSpaceService.transitive_closure(relation)
        return relation

    def per(self, reference: Union[str, PerDocument], base: Path) -> Per:
        document, _ = self.resolve(reference, PerDocument, base)
        return Per(carrier=document.carrier, pairs=frozenset(map(tuple, document.pairs)))

    def space(self, body: SpaceBody, base: Path) -> ComputableSpace:
        relation = self.relation(body.relation, base)
        if body.points is None:
            return IdealSpaceService.whole_space(relation)
        return IdealSpaceService.subspace(relation, (frozenset(point) for point in body.points))

    def category(self, reference: Union[str, CategoryDocument], base: Path) -> CategoryInstance:
        document, base = self.resolve(reference, CategoryDocument, base)
        return CategoryInstance(
            objects=self.space(document.objects, base),
            morphisms=self.space(document.morphisms, base),
            src=tuple(document.src),
            tar=tuple(document.tar),
            identity=tuple(document.id),
            comp=_table(((g, f), h) for g, f, h in document.comp),
        )

    def functor(self, reference: Union[str, FunctorDocument], base: Path) -> FunctorInstance:
        document, base = self.resolve(reference, FunctorDocument, base)
        category = self.category(document.category, base)
        objects = tuple(self.per(per, base) for per in document.objects)
        if len(objects) != category.objects.size or len(document.morphisms) != category.morphisms.size:
            raise InputError("関手の表の長さが圏の点の数と一致しません")
        morphisms = tuple(
            self.graph(body, objects[category.src[f]], objects[category.tar[f]])
            for f, body in enumerate(document.morphisms)
        )
        return FunctorInstance(category=category, objects=objects, morphisms=morphisms)

    def nat_trans(self, reference: Union[str, NatTransDocument], base: Path) -> NatTransInstance:
        document, base = self.resolve(reference, NatTransDocument, base)
        source = self.functor(document.source, base)
        target = self.functor(document.target, base)
        if len(document.components) != len(source.objects):
            raise InputError("自然変換の成分の数が圏の対象の数と一致しません")
        components = tuple(
            self.graph(body, source.objects[c], target.objects[c]) for c, body in enumerate(document.components)
        )
        return NatTransInstance(source=source, target=target, components=components)

    def graph(self, body: GraphBody, src: Per, tar: Per) -> CntMorphism:
        return CntMorphism(
            graph=frozenset(map(tuple, body.graph)),
            src=self.per(body.src, Path(".")) if body.src is not None else src,
            tar=self.per(body.tar, Path(".")) if body.tar is not None else tar,
        )

    def etale(
        self, reference: Union[str, EtaleDocument], base: Path, base_space: Optional[ComputableSpace]
    ) -> EtaleInstance:
        document, base = self.resolve(reference, EtaleDocument, base)
        total = self.space(document.total, base)
        if document.base is not None:
            declared = self.space(document.base, base)
            if base_space is not None and declared != base_space:
                raise InputError("エタール空間の底空間が圏の対象の空間と一致しません")
            base_space = declared
        if base_space is None:
            raise InputError("エタール空間には底空間 base が必要です")
        return EtaleInstance(
            total=total,
            base=base_space,
            projection=tuple(document.projection),
            charts=tuple(self.chart(body, total, base_space) for body in document.charts),
        )

    def chart(self, body: ChartBody, total: ComputableSpace, base_space: ComputableSpace) -> Chart:
        return Chart(
            domain=CeOpen(over=total.relation, generators=CeSet.of(body.domain)),
            image=CeOpen(over=base_space.relation, generators=CeSet.of(body.image)),
            section=_table((y, x) for y, x in body.section),
        )

    def cset(self, reference: Union[str, CsetDocument], base: Path) -> ActionInstance:
        document, base = self.resolve(reference, CsetDocument, base)
        category = self.category(document.category, base)
        etale = self.etale(document.etale, base, category.objects)
        action = _table(((f, x), y) for f, x, y in document.action)
        return ActionInstance(category=category, etale=etale, action=action)

    def equivariant(self, document: EquivariantDocument, base: Path) -> EquivariantMapInstance:
        return EquivariantMapInstance(
            source=self.cset(document.source, base),
            target=self.cset(document.target, base),
            mapping=tuple(document.map),
        )


def _table(entries: Iterable[Tuple[Any, int]]) -> Dict[Any, int]:
    table: Dict[Any, int] = {}
    for key, value in entries:
        if key in table and table[key] != value:
            raise InputError(f"表の項目 {key} に異なる値が指定されています")
        table[key] = value
    return table


def _relation_document(relation: TransitiveRelation) -> RelationDocument:
    if not relation.is_finite:
        raise InputError("列挙で与えた関係は書き出せません")
    return RelationDocument(carrier=relation.carrier or 0, pairs=sorted(relation.pairs))


def _per_document(per: Per) -> PerDocument:
    return PerDocument(carrier=per.carrier, pairs=sorted(per.pairs))


def _space_body(space: ComputableSpace) -> SpaceBody:
    return SpaceBody(relation=_relation_document(space.relation), points=[sorted(point) for point in space.points])


def _category_document(category: CategoryInstance) -> CategoryDocument:
    return CategoryDocument(
        objects=_space_body(category.objects),
        morphisms=_space_body(category.morphisms),
        src=list(category.src),
        tar=list(category.tar),
        id=list(category.identity),
        comp=sorted((g, f, h) for (g, f), h in category.comp.items()),
    )


def _graph_body(morphism: CntMorphism, src: Per, tar: Per) -> GraphBody:
    # 表から決まる始域・終域と異なるときだけ書き出す
    return GraphBody(
        graph=sorted(morphism.graph),
        src=_per_document(morphism.src) if morphism.src != src or morphism.src.carrier != src.carrier else None,
        tar=_per_document(morphism.tar) if morphism.tar != tar or morphism.tar.carrier != tar.carrier else None,
    )


def _functor_document(functor: FunctorInstance) -> FunctorDocument:
    category = functor.category
    return FunctorDocument(
        category=_category_document(category),
        objects=[_per_document(per) for per in functor.objects],
        morphisms=[
            _graph_body(morphism, functor.objects[category.src[f]], functor.objects[category.tar[f]])
            for f, morphism in enumerate(functor.morphisms)
        ],
    )


def _generators(open_set: CeOpen) -> List[int]:
    items = open_set.generators.finite_items
    if items is None:
        raise InputError("列挙で与えた開集合は書き出せません")
    return sorted(items)


def _etale_document(etale: EtaleInstance, with_base: bool) -> EtaleDocument:
    return EtaleDocument(
        total=_space_body(etale.total),
        base=_space_body(etale.base) if with_base else None,
        projection=list(etale.projection),
        charts=[
            ChartBody(
                domain=_generators(chart.domain),
                image=_generators(chart.image),
                section=sorted(chart.section.items()),
            )
            for chart in etale.charts
        ],
    )


def _cset_document(action: ActionInstance) -> CsetDocument:
    return CsetDocument(
        category=_category_document(action.category),
        etale=_etale_document(action.etale, with_base=False),
        action=sorted((f, x, y) for (f, x), y in action.action.items()),
    )
