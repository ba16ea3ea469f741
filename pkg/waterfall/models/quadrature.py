from pydantic import BaseModel, ConfigDict, Field


class QuadratureConfig(BaseModel):
    """Tolerances for the adaptive integrators"""

    model_config = ConfigDict(frozen=True)

    rel_tol: float = Field(default=1e-9, gt=0.0)
    abs_tol: float = Field(default=1e-12, ge=0.0)
    max_subdivisions: int = Field(default=2000, ge=1)


DEFAULT_QUADRATURE = QuadratureConfig()
