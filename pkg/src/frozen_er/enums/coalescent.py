from enum import IntEnum


class EventKind(IntEnum):
    """Events of the frozen multiplicative coalescent."""

    STD_STD_MERGE = 0  # x, y standard -> standard x + y at rate xy
    FREEZE = 1  # standard x -> frozen x at rate x^2 / 2
    STD_FROZEN_MERGE = 2  # standard x, frozen y -> frozen x + y at rate pxy
    ABSORBED = 3  # no standard particle left, nothing can happen
