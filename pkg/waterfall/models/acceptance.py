from typing import Optional

from pydantic import BaseModel, ConfigDict, computed_field


class CriterionResult(BaseModel):
    """One row of the acceptance table"""

    model_config = ConfigDict(frozen=True)

    number: int
    name: str
    expected: str
    measured: str
    tolerance: str
    within_tolerance: bool
    runtime_s: float
    budget_s: Optional[float] = None
    detail: str = ""

    @computed_field
    @property
    def within_budget(self) -> bool:
        return self.budget_s is None or self.runtime_s <= self.budget_s

    @computed_field
    @property
    def passed(self) -> bool:
        return self.within_tolerance and self.within_budget
