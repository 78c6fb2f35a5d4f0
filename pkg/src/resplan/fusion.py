"""Late fusion: combine several binary plans into one consensus plan."""

from __future__ import annotations

from typing import Sequence

from .errors import LengthMismatchError, ResplanError
from .plans import BinaryPlan


class EmptyInputError(ResplanError):
    """Fusion needs at least one plan."""


def fuse(plans: Sequence[BinaryPlan]) -> BinaryPlan:
    """Element-wise average of the input vectors, rounded to bits.

    Rounding is half-up: an exact 0.5 average (possible only for even input
    counts) includes the action. 2 * ones >= m is the exact integer form of
    round-half-up applied to ones/m.
    """
    if not plans:
        raise EmptyInputError("no plans to fuse")
    m = len(plans)
    n = len(plans[0].bits)
    lengths = sorted({len(p.bits) for p in plans})
    if lengths != [n]:
        raise LengthMismatchError(lengths, expected=n)
    bits = tuple(
        1 if 2 * sum(plan.bits[j] for plan in plans) >= m else 0 for j in range(n)
    )
    return BinaryPlan(bits=bits, source=f"fused({m})")
