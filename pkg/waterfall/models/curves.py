"""
Detection-probability curves for performance plots
"""

from typing import List, Literal, Tuple

from pydantic import BaseModel, model_validator


class DetectionCurve(BaseModel):
    """Sampled P_d(gamma), probability of a fully correct frame in AWGN"""

    points: List[Tuple[float, float]]
    source: Literal["analytic", "monte_carlo"] = "analytic"
    label: str = ""

    @model_validator(mode="after")
    def check_points(self) -> "DetectionCurve":
        gammas = [g for g, _ in self.points]
        if any(b <= a for a, b in zip(gammas, gammas[1:])):
            raise ValueError("detection curve SNR values must be strictly increasing")
        if any(not 0.0 <= pd <= 1.0 for _, pd in self.points):
            raise ValueError("detection probabilities must lie in [0, 1]")
        return self


class NormalizedPoint(BaseModel):
    gamma: float
    value: float  # P_d or P_e over gamma^2
    envelope: float  # 1 / gamma^2


class NormalizedCurve(BaseModel):
    points: List[NormalizedPoint]
    label: str = ""
    quantity: Literal["P_d/gamma^2", "P_e/gamma^2"] = "P_d/gamma^2"
