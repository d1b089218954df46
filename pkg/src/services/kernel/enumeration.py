from collections.abc import Callable, Iterable
from dataclasses import dataclass
from enum import Enum
from typing import Any, Optional, Protocol, Tuple, Union

from ...models.errors import InputError

Item = Union[int, Tuple[Any, ...]]

# 「このステップでは何も出力しない」ことを表す印
PASS = None


class Enumeration(Protocol):
    """問い合わせ可能な列挙の共通インターフェース

    at(step) は同じ step に対して常に同じ結果を返す。length が None でなければ
    length 以降のステップは PASS のみを返す（尽きた列挙）。
    """

    @property
    def length(self) -> Optional[int]: ...

    def at(self, step: int) -> Optional[Item]: ...


@dataclass(frozen=True)
class FiniteEnumeration:
    """有限個の要素を順に出力する列挙"""

    items: Tuple[Item, ...]

    @property
    def length(self) -> Optional[int]:
        return len(self.items)

    def at(self, step: int) -> Optional[Item]:
        if 0 <= step < len(self.items):
            return self.items[step]
        return PASS


@dataclass(frozen=True)
class StreamEnumeration:
    """ステップ番号から出力を計算する（無限でもよい）列挙"""

    step_fn: Callable[[int], Optional[Item]]
    length: Optional[int] = None

    def at(self, step: int) -> Optional[Item]:
        if step < 0 or (self.length is not None and step >= self.length):
            return PASS
        return self.step_fn(step)


@dataclass(frozen=True)
class DovetailEnumeration:
    """複数の列挙を公平に交互に問い合わせる列挙

    ソース i はステップ番号が k を法として i と合同なときに問い合わせられ、
    出力は (i, item) の形でタグ付けされる。
    """

    sources: Tuple[Enumeration, ...]

    @property
    def length(self) -> Optional[int]:
        lengths = [source.length for source in self.sources]
        if any(length is None for length in lengths):
            return None
        return len(self.sources) * max(length for length in lengths if length is not None)

    def at(self, step: int) -> Optional[Item]:
        k = len(self.sources)
        index = step % k
        item = self.sources[index].at(step // k)
        if item is PASS:
            return PASS
        return (index, item)


class EnumerationFactory:
    """値の種類から対応する列挙を作成する"""

    @staticmethod
    def create(source: Any, length: Optional[int] = None) -> Enumeration:
        if isinstance(source, (FiniteEnumeration, StreamEnumeration, DovetailEnumeration)):
            return source
        if callable(source):
            return StreamEnumeration(step_fn=source, length=length)
        if isinstance(source, Iterable):
            return FiniteEnumeration(items=tuple(sorted(source, key=_sort_key)))
        raise InputError(f"列挙に変換できない値です: {source!r}")

    @staticmethod
    def empty() -> Enumeration:
        return FiniteEnumeration(items=())


def _sort_key(item: Item) -> Tuple[int, Any]:
    # 整数と組が混在しても順序が決まるようにする
    if isinstance(item, tuple):
        return (1, item)
    return (0, item)


@dataclass(frozen=True)
class CeSet:
    """列挙が出力する全要素の集合（出力順・重複は無関係）"""

    enumeration: Enumeration

    @classmethod
    def of(cls, source: Any, length: Optional[int] = None) -> "CeSet":
        return cls(enumeration=EnumerationFactory.create(source, length))

    @property
    def finite_items(self) -> Optional[frozenset]:
        """尽きる列挙なら出力集合そのもの、そうでなければ None"""
        length = self.enumeration.length
        if length is None:
            return None
        items = (self.enumeration.at(step) for step in range(length))
        return frozenset(item for item in items if item is not PASS)


@dataclass(frozen=True)
class Fuel:
    """半決定手続きが消費してよい問い合わせ回数"""

    max_steps: int

    def __post_init__(self) -> None:
        if self.max_steps < 0:
            raise InputError(f"fuel は0以上である必要があります（現在: {self.max_steps}）")


class Verdict(str, Enum):
    YES = "yes"
    NO = "no"
    UNKNOWN = "unknown"


def dovetail(sources: Iterable[Enumeration]) -> DovetailEnumeration:
    """ソース列挙の和集合を公平に列挙する"""
    source_tuple = tuple(sources)
    if not source_tuple:
        raise InputError("dovetail には少なくとも1つの列挙が必要です")
    return DovetailEnumeration(sources=source_tuple)


def member(ce_set: CeSet, n: Item, fuel: Fuel) -> Verdict:
    """n が出力されるまで最大 fuel ステップ探索する（見つからなければ UNKNOWN）"""
    enumeration = ce_set.enumeration
    for step in range(fuel.max_steps):
        if enumeration.length is not None and step >= enumeration.length:
            break
        if enumeration.at(step) == n:
            return Verdict.YES
    return Verdict.UNKNOWN


def emitted(enumeration: Enumeration, fuel: Fuel) -> frozenset:
    """fuel ステップ以内に出力された要素の集合"""
    steps = fuel.max_steps
    if enumeration.length is not None:
        steps = min(steps, enumeration.length)
    items = (enumeration.at(step) for step in range(steps))
    return frozenset(item for item in items if item is not PASS)
