"""
Barrier potential alpha(s) acting between virtual coordinates.
"""

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator


class AlphaPotential(BaseModel):
    """
    Repulsion weight alpha(s) = (s - R)^2 / (s - r)^2 on (r, R], 0 beyond R.

    Unbounded as s -> r+, strictly decreasing on (r, R), and continuous with a
    continuous derivative at s = R.
    """

    model_config = ConfigDict(frozen=True)

    r: float = Field(..., gt=0.0, description="Safe radius in virtual-coordinate units")
    R: float = Field(..., gt=0.0, description="Sensing radius in virtual-coordinate units")

    @model_validator(mode="after")
    def _check_radii(self):
        if not self.r < self.R:
            raise ValueError(f"safe radius r={self.r} must be smaller than sensing radius R={self.R}")
        return self

    def values(self, s) -> np.ndarray:
        """Vectorised alpha for distances that are all > r."""
        s = np.asarray(s, dtype=float)
        inside = s <= self.R
        return np.where(inside, (s - self.R) ** 2 / (s - self.r) ** 2, 0.0)

    def derivative(self, s) -> np.ndarray:
        """d alpha / ds = 2 (s - R)(R - r) / (s - r)^3 on (r, R], 0 beyond."""
        s = np.asarray(s, dtype=float)
        inside = s <= self.R
        return np.where(inside, 2.0 * (s - self.R) * (self.R - self.r) / (s - self.r) ** 3, 0.0)

    def antiderivative(self, s) -> np.ndarray:
        """A(s) = s + 2(r - R) ln(s - r) - (r - R)^2 / (s - r), valid on (r, R]."""
        s = np.asarray(s, dtype=float)
        gap = self.r - self.R
        return s + 2.0 * gap * np.log(s - self.r) - gap**2 / (s - self.r)

    def integral(self, lower, upper=None) -> np.ndarray:
        """Integral of alpha over [lower, upper] (upper defaults to R); both bounds > r."""
        upper = self.R if upper is None else upper
        a = np.minimum(np.asarray(lower, dtype=float), self.R)
        b = np.minimum(np.asarray(upper, dtype=float), self.R)
        return self.antiderivative(b) - self.antiderivative(a)
