from typing import Annotated, Any, Dict, List, Literal, Optional, Tuple, Union

from pydantic import BaseModel, Field, field_validator

from ..config import DEFAULT_FUEL

PairList = List[Tuple[int, int]]


class Finding(BaseModel):
    """検査で見つかった違反1件"""

    rule: str
    message: str
    witness: Dict[str, Any] = Field(default_factory=dict)


class Report(BaseModel):
    """検査結果の標準形式（status が ok であることと findings が空であることは同値）"""

    status: Literal["ok", "violation", "input-error"]
    subject: Optional[str] = None
    findings: List[Finding] = Field(default_factory=list)
    data: Optional[Any] = None

    @classmethod
    def from_findings(cls, findings: List[Finding], subject: Optional[str] = None) -> "Report":
        return cls(status="violation" if findings else "ok", subject=subject, findings=findings)

    @classmethod
    def input_error(cls, message: str, subject: Optional[str] = None) -> "Report":
        return cls(
            status="input-error",
            subject=subject,
            findings=[Finding(rule="input.error", message=message)],
        )

    @property
    def ok(self) -> bool:
        return self.status == "ok"

    def merged(self, *others: "Report") -> "Report":
        """複数の報告の findings をまとめる（入力エラーが1つでもあれば入力エラー）"""
        reports = (self, *others)
        findings = [finding for report in reports for finding in report.findings]
        if any(report.status == "input-error" for report in reports):
            return Report(status="input-error", subject=self.subject, findings=findings)
        return Report.from_findings(findings, subject=self.subject)

    def with_data(self, data: Any) -> "Report":
        return self.model_copy(update={"data": data})


class _Document(BaseModel):
    """インスタンスファイルの共通設定（未知のキーは読み飛ばす）"""

    model_config = {"extra": "ignore"}


class RelationDocument(_Document):
    kind: Literal["relation"] = "relation"
    carrier: int = Field(..., ge=0)
    pairs: PairList = Field(default_factory=list)


class PerDocument(_Document):
    kind: Literal["per"] = "per"
    carrier: int = Field(..., ge=0)
    pairs: PairList = Field(default_factory=list)


class CntMorphismDocument(_Document):
    kind: Literal["cnt-morphism"] = "cnt-morphism"
    graph: PairList = Field(default_factory=list)
    src: Union[str, PerDocument]
    tar: Union[str, PerDocument]


class WitnessDocument(_Document):
    kind: Literal["witness"] = "witness"
    relation: Union[str, RelationDocument]
    overt: List[int] = Field(default_factory=list)
    discrete: PairList = Field(default_factory=list)


class SpaceBody(_Document):
    """空間 (≺, X)。points を省略すると全イデアル"""

    relation: Union[str, RelationDocument]
    points: Optional[List[List[int]]] = None


class CategoryDocument(_Document):
    kind: Literal["category"] = "category"
    objects: SpaceBody
    morphisms: SpaceBody
    src: List[int]
    tar: List[int]
    id: List[int]
    comp: List[Tuple[int, int, int]] = Field(default_factory=list)


class GraphBody(_Document):
    """関手・自然変換の射成分。src/tar を省略すると表から補う"""

    graph: PairList = Field(default_factory=list)
    src: Optional[PerDocument] = None
    tar: Optional[PerDocument] = None


class FunctorDocument(_Document):
    kind: Literal["functor"] = "functor"
    category: Union[str, CategoryDocument]
    objects: List[Union[str, PerDocument]]
    morphisms: List[GraphBody]


class NatTransDocument(_Document):
    kind: Literal["nat-trans"] = "nat-trans"
    source: Union[str, FunctorDocument]
    target: Union[str, FunctorDocument]
    components: List[GraphBody]


class ChartBody(_Document):
    domain: List[int] = Field(default_factory=list)
    image: List[int] = Field(default_factory=list)
    section: PairList = Field(default_factory=list)


class EtaleDocument(_Document):
    kind: Literal["etale"] = "etale"
    total: SpaceBody
    base: Optional[SpaceBody] = None
    projection: List[int]
    charts: List[ChartBody]


class CsetDocument(_Document):
    kind: Literal["cset"] = "cset"
    category: Union[str, CategoryDocument]
    etale: EtaleDocument
    action: List[Tuple[int, int, int]] = Field(default_factory=list)


class EquivariantDocument(_Document):
    kind: Literal["equivariant"] = "equivariant"
    source: Union[str, CsetDocument]
    target: Union[str, CsetDocument]
    map: List[int]

    @field_validator("map")
    @classmethod
    def validate_map(cls, v: List[int]) -> List[int]:
        """写像の値が自然数であることを検証"""
        if any(value < 0 for value in v):
            raise ValueError("写像の値は0以上である必要があります")
        return v


InstanceDocument = Annotated[
    Union[
        RelationDocument,
        PerDocument,
        CntMorphismDocument,
        WitnessDocument,
        CategoryDocument,
        FunctorDocument,
        NatTransDocument,
        EtaleDocument,
        CsetDocument,
        EquivariantDocument,
    ],
    Field(discriminator="kind"),
]

INSTANCE_KINDS = (
    "relation",
    "per",
    "cnt-morphism",
    "witness",
    "category",
    "functor",
    "nat-trans",
    "etale",
    "cset",
    "equivariant",
)


class CommandOptions(BaseModel):
    """コマンド共通のオプション"""

    fuel: int = Field(default=DEFAULT_FUEL, ge=0)
    closure: bool = False
