"""列挙・公平探索・符号化の基盤"""

from .coding import pair, set_decode, set_encode, unpair
from .enumeration import (
    PASS,
    CeSet,
    DovetailEnumeration,
    Enumeration,
    EnumerationFactory,
    FiniteEnumeration,
    Fuel,
    StreamEnumeration,
    Verdict,
    dovetail,
    emitted,
    member,
)

__all__ = [
    "PASS",
    "CeSet",
    "DovetailEnumeration",
    "Enumeration",
    "EnumerationFactory",
    "FiniteEnumeration",
    "Fuel",
    "StreamEnumeration",
    "Verdict",
    "dovetail",
    "emitted",
    "member",
    "pair",
    "set_decode",
    "set_encode",
    "unpair",
]
