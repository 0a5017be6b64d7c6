"""Models for analytic operation counts."""

from functools import reduce
from typing import Annotated

from annotated_types import Ge
from pydantic import BaseModel, ConfigDict, Field

NonNegative = Annotated[int, Ge(0)]


class OpCount(BaseModel):
    """Real multiplies and adds of a computation."""

    model_config = ConfigDict(frozen=True)

    multiplies: NonNegative = Field(default=0, description="Real multiplies.")
    adds: NonNegative = Field(default=0, description="Real adds.")

    @property
    def total(self) -> int:
        """Multiplies plus adds."""
        return self.multiplies + self.adds

    @property
    def mflops(self) -> float:
        """Total in millions of FLOPs."""
        return self.total / 1e6

    def __add__(self, other: "OpCount") -> "OpCount":
        """Sum two counts."""
        return OpCount(multiplies=self.multiplies + other.multiplies, adds=self.adds + other.adds)


class CostRow(BaseModel):
    """The count of one named component."""

    model_config = ConfigDict(frozen=True)

    name: str = Field(description="Component name, e.g. '0:conv1d' or 'fft'.")
    count: OpCount = Field(description="Its operation count.")


class CostBreakdown(BaseModel):
    """Per-component counts of a model or expert estimator."""

    model_config = ConfigDict(frozen=True)

    rows: tuple[CostRow, ...] = Field(default=(), description="The components.")

    @property
    def total(self) -> OpCount:
        """Sum over all components."""
        return reduce(lambda a, b: a + b, (r.count for r in self.rows), OpCount())

    def share(self, row: CostRow) -> float:
        """Fraction of the total FLOPs spent in one component (0 for an empty total)."""
        total = self.total.total
        return row.count.total / total if total else 0.0

    def by_share(self) -> "CostBreakdown":
        """The same rows, most expensive first (stable for ties)."""
        return CostBreakdown(rows=tuple(sorted(self.rows, key=lambda r: -r.count.total)))


class FlopTableRow(BaseModel):
    """One row of an expert-versus-network complexity table."""

    model_config = ConfigDict(frozen=True)

    block_len: int = Field(description="Estimator input length in samples.")
    expert_mflop: float = Field(description="Expert estimator MFLOPs.")
    nn_mflop: float = Field(description="Network estimator MFLOPs.")
