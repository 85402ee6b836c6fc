from pydantic import BaseModel, ConfigDict, Field, PrivateAttr

from src.frozen_er.enums import ComponentStatus


class EdgeSample(BaseModel):
    """One examined edge, endpoints numbered 1..n. Self-loops and repeats allowed."""

    model_config = ConfigDict(frozen=True)

    m: int = Field(ge=1)  # position in the edge stream
    a: int = Field(ge=1)
    b: int = Field(ge=1)
    u: float = Field(gt=0.0, le=1.0)  # keep-mark compared with p


class ComponentRecord(BaseModel):
    model_config = ConfigDict(frozen=True)

    root: int = Field(ge=0)  # internal union-find root (0-based)
    smallest_vertex: int = Field(ge=1)
    size: int = Field(ge=1)
    status: ComponentStatus
    kept_edges: int = Field(ge=0)


class GraphObservables(BaseModel):
    model_config = ConfigDict(frozen=True)

    frozen_sizes: list[int]
    standard_sizes: list[int]
    frozen_mass_rescaled: float = Field(ge=0.0)
    discarded: int = Field(ge=0)


class ClassicalObservables(BaseModel):
    model_config = ConfigDict(frozen=True)

    surplus_vertices: int = Field(ge=0)
    classical_sizes: list[int]


class GraphState(BaseModel):
    """Frozen graph F_p(n, m) coupled edge-for-edge with the multigraph G(n, m).

    Union-find arrays are indexed by 0-based vertex; `size`, `status` and
    `kept_edges` are meaningful at roots only. The classical tracker has its own
    union-find with an integer surplus per root.
    """

    model_config = ConfigDict(frozen=False)

    n: int = Field(ge=1)
    p: float = Field(ge=0.0, le=1.0)
    seed: int = Field(ge=0, le=2**64 - 1)
    m: int = Field(ge=0, default=0)

    parent: list[int]
    size: list[int]
    status: list[ComponentStatus]
    kept_edges: list[int]

    classical_parent: list[int]
    classical_size: list[int]
    surplus: list[int]

    frozen_vertices: int = Field(ge=0, default=0)
    discarded: int = Field(ge=0, default=0)
    surplus_vertices: int = Field(ge=0, default=0)

    # size -> number of components, kept up to date on every edge
    tree_size_counts: dict[int, int] = Field(default_factory=dict)
    forest_size_counts: dict[int, int] = Field(default_factory=dict)

    # Block of the counter-based edge stream starting at edge index _block_start
    _block_start: int = PrivateAttr(default=0)
    _block_a: list[int] = PrivateAttr(default_factory=list)
    _block_b: list[int] = PrivateAttr(default_factory=list)
    _block_u: list[float] = PrivateAttr(default_factory=list)

    @property
    def kept(self) -> int:
        return self.m - self.discarded
