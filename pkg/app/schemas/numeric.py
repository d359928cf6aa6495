import contextlib
import mpmath
from mpmath import mpc, mpf
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator
from typing import Dict, Optional

class PrecisionContext(BaseModel):
    """Working precision. Every numeric operation takes one explicitly."""
    model_config = ConfigDict(frozen=True)

    bits: int = Field(128, ge=53)
    guard_bits: int = Field(32, ge=0)

    @property
    def work_bits(self) -> int:
        return self.bits + self.guard_bits

    @property
    def eps(self) -> mpf:
        return mpf(2) ** (-self.bits)

    def workprec(self):
        """Context manager running mpmath at bits + guard_bits"""
        return mpmath.workprec(self.work_bits)

    def round(self, x):
        """Round a result to the requested `bits`"""
        with mpmath.workprec(self.bits):
            return +x

    def doubled(self) -> "PrecisionContext":
        return PrecisionContext(bits=2 * self.bits, guard_bits=self.guard_bits)


@contextlib.contextmanager
def _building(pc: Optional[PrecisionContext]):
    """Precision in force while an input is parsed; yields its bit count"""
    if pc is None:
        yield mpmath.mp.prec
        return
    with pc.workprec():
        yield pc.work_bits


class EvalPoint(BaseModel):
    """t with Re(t) > 0 inside the sector |arg t| <= pi/2 - theta"""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    t: mpc
    theta: float = Field(gt=0)
    # precision t was rounded to when the point was built
    input_bits: int = Field(default_factory=lambda: mpmath.mp.prec, ge=2)

    @field_validator("t", mode="before")
    @classmethod
    def coerce_t(cls, value):
        return mpmath.mpc(value)

    @field_validator("t")
    @classmethod
    def check_half_plane(cls, value):
        if value.real <= 0:
            raise ValueError(f"Re(t) must be positive, got {mpmath.nstr(value, 8)}")
        return value

    @model_validator(mode="after")
    def check_sector(self):
        if abs(mpmath.arg(self.t)) > mpmath.pi / 2 - self.theta + mpf(2) ** -40:
            raise ValueError(
                f"|arg t| = {float(abs(mpmath.arg(self.t))):.6g} exceeds pi/2 - theta = "
                f"{float(mpmath.pi / 2 - self.theta):.6g}"
            )
        return self

    @classmethod
    def from_polar(cls, t_abs, t_arg, theta: float, pc: Optional[PrecisionContext] = None) -> "EvalPoint":
        """
        t = t_abs e^{i t_arg}. Decimal strings are exact inputs; with `pc` they are
        rounded at the working precision instead of mpmath's current one.
        """
        with _building(pc) as bits:
            t_abs = mpmath.mpf(t_abs)
            t = t_abs if mpmath.mpf(t_arg) == 0 else t_abs * mpmath.expj(mpmath.mpf(t_arg))
            return cls(t=t, theta=theta, input_bits=bits)

    @classmethod
    def real(cls, t, theta: float = 0.5, pc: Optional[PrecisionContext] = None) -> "EvalPoint":
        with _building(pc) as bits:
            return cls(t=mpmath.mpc(t), theta=theta, input_bits=bits)

    @property
    def z(self) -> mpc:
        return mpmath.exp(-self.t)


class SeriesValue(BaseModel):
    """A value with its discarded-tail bound and diagnostics"""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    value: mpc
    tail_bound: mpf
    terms_used: int
    rounding_slack: mpf = mpf(0)
    # |F'(t)| |delta t| for a t rounded below the working precision
    input_rounding: mpf = mpf(0)
    wall_notes: Dict[str, float] = {}

    @property
    def error_budget(self) -> mpf:
        return self.tail_bound + self.rounding_slack + self.input_rounding
