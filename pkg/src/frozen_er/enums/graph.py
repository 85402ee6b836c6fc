from enum import IntEnum


class ComponentStatus(IntEnum):
    """Status of a component of the frozen graph.

    Trees are standard components; frozen components carry exactly one cycle.
    """

    TREE = 0
    FROZEN = 1


class TransitionKind(IntEnum):
    """Which of the transition rules an examined edge triggered."""

    TREE_TREE_MERGE = 0
    TREE_CYCLE_FREEZE = 1
    FROZEN_FROZEN_DISCARD = 2
    TREE_FROZEN_KEPT = 3
    TREE_FROZEN_DISCARDED = 4

    @property
    def kept(self) -> bool:
        return self in (TransitionKind.TREE_TREE_MERGE, TransitionKind.TREE_CYCLE_FREEZE, TransitionKind.TREE_FROZEN_KEPT)
