from math import isqrt
from typing import AbstractSet, FrozenSet, Tuple

from ...models.errors import InputError


def pair(a: int, b: int) -> int:
    """Cantor の対関数"""
    if a < 0 or b < 0:
        raise InputError(f"自然数の組が必要です: ({a}, {b})")
    return (a + b) * (a + b + 1) // 2 + b


def unpair(n: int) -> Tuple[int, int]:
    if n < 0:
        raise InputError(f"自然数が必要です: {n}")
    w = (isqrt(8 * n + 1) - 1) // 2
    b = n - w * (w + 1) // 2
    return (w - b, b)


def set_encode(elements: AbstractSet[int]) -> int:
    """有限集合をビット集合として符号化する"""
    code = 0
    for element in elements:
        if element < 0:
            raise InputError(f"自然数の集合が必要です: {sorted(elements)}")
        code |= 1 << element
    return code


def set_decode(code: int) -> FrozenSet[int]:
    if code < 0:
        raise InputError(f"自然数が必要です: {code}")
    return frozenset(position for position in range(code.bit_length()) if code >> position & 1)
