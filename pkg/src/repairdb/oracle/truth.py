"""The three-valued structure with values t, f and ⊤."""

from __future__ import annotations

from collections.abc import Iterable
from enum import Enum


class TruthValue(str, Enum):
    """Truth order ``f < ⊤ < t``; knowledge order has ``⊤`` on top of ``t`` and ``f``."""

    F = "f"
    TOP = "⊤"
    T = "t"

    @property
    def rank(self) -> int:
        return _RANK[self]

    @property
    def designated(self) -> bool:
        return self is not TruthValue.F

    def __invert__(self) -> TruthValue:
        return {TruthValue.T: TruthValue.F, TruthValue.F: TruthValue.T}.get(self, TruthValue.TOP)

    def __and__(self, other: TruthValue) -> TruthValue:
        return self if self.rank <= other.rank else other

    def __or__(self, other: TruthValue) -> TruthValue:
        return self if self.rank >= other.rank else other

    def __str__(self) -> str:
        return self.value


_RANK = {TruthValue.F: 0, TruthValue.TOP: 1, TruthValue.T: 2}


def from_bool(value: bool) -> TruthValue:
    return TruthValue.T if value else TruthValue.F


def t_leq(a: TruthValue, b: TruthValue) -> bool:
    return a.rank <= b.rank


def k_leq(a: TruthValue, b: TruthValue) -> bool:
    return a is b or b is TruthValue.TOP


def join(a: TruthValue, b: TruthValue) -> TruthValue:
    """Knowledge join: equal values stay, anything else becomes ⊤."""
    return a if a is b else TruthValue.TOP


def meet_all(values: Iterable[TruthValue]) -> TruthValue:
    result = TruthValue.T
    for value in values:
        result = result & value
        if result is TruthValue.F:
            break
    return result


def join_all(values: Iterable[TruthValue]) -> TruthValue:
    result = TruthValue.F
    for value in values:
        result = result | value
        if result is TruthValue.T:
            break
    return result
