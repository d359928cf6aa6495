import mpmath
from mpmath import mpc, mpf
from pydantic import BaseModel, ConfigDict, Field, model_validator
from typing import Dict, Literal, Optional

from app.schemas.arith import ArithFunctionId
from app.schemas.numeric import SeriesValue

# Height of the first nontrivial zeta zero is 14.1347...
SAFE_CONTOUR_HEIGHT = 14.0


class ZeroFreeRegionSpec(BaseModel):
    """sigma >= g(tau), the Korobov-Vinogradov shaped region"""
    model_config = ConfigDict(frozen=True)

    alpha: float = Field(2 / 3, gt=0)
    beta: float = Field(1 / 3, gt=0)
    b: float = Field(0.0203, gt=0)
    w: float = Field(16.0, gt=float(mpmath.e))

    def g(self, tau):
        """1 - b (log|tau|)^-alpha (log log|tau|)^-beta, frozen at |tau| = w below w"""
        tau = max(abs(mpf(tau)), mpf(self.w))
        log_tau = mpmath.log(tau)
        return 1 - self.b * log_tau ** (-self.alpha) * mpmath.log(log_tau) ** (-self.beta)

    def g_prime(self, tau):
        """dg/dtau (zero on |tau| < w)"""
        tau = mpf(tau)
        if abs(tau) <= self.w:
            return mpf(0)
        log_tau = mpmath.log(abs(tau))
        llog = mpmath.log(log_tau)
        base = self.b * log_tau ** (-self.alpha) * llog ** (-self.beta)
        slope = base * (self.alpha / log_tau + self.beta / (log_tau * llog)) / abs(tau)
        return slope if tau > 0 else -slope


class QuadControls(BaseModel):
    """Panel quadrature controls"""
    max_degree: int = Field(8, ge=2)
    panel_width: Optional[float] = None  # default: one oscillation period of t^{-i tau}
    max_subdivisions: int = Field(3, ge=0)
    target_abs_err: float = Field(1e-12, gt=0)


class ContourSpec(BaseModel):
    """The deformed path: vertical rays above +-iT at Re = kappa, horizontals at +-iT, arc sigma = g(tau)"""
    kappa: float = Field(gt=1)
    T: float = Field(gt=0)
    region: ZeroFreeRegionSpec = ZeroFreeRegionSpec()
    quad: QuadControls = QuadControls()
    unsafe_override: bool = False

    @model_validator(mode="after")
    def check_kappa_right_of_arc(self):
        if self.region.g(self.T) >= self.kappa:
            raise ValueError("kappa must lie to the right of the arc g(T)")
        return self


class DirichletClosedForm(BaseModel):
    """Closed form of D(s) = sum a_n n^-s as listed in the resource file"""
    fn_id: ArithFunctionId
    formula: str
    nu: float = 2.0
    analytic_in_region: bool
    abs_bound: str


class MellinResult(BaseModel):
    """Inverse Mellin value with its path data"""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    fn_id: ArithFunctionId
    t: mpc
    contour: Literal["line", "deformed"]
    kappa: mpf
    T: Optional[mpf] = None
    height: mpf                  # truncation height H of the vertical rays
    result: SeriesValue          # tail_bound = truncation, rounding_slack = quadrature estimate
    segments: Dict[str, mpc] = {}
    majorants: Dict[str, mpf] = {}
    c_d: Optional[mpf] = None

    @property
    def value(self) -> mpc:
        return self.result.value

    @property
    def quad_error_budget(self) -> mpf:
        return self.result.error_budget
