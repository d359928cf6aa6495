import re
from enum import Enum
from typing import Dict, List

import mpmath
from pydantic import BaseModel, ConfigDict, Field, model_validator

from app.schemas.arith import ArithFunctionId


class MainTermSource(str, Enum):
    PAPER_LITERAL = "paper-literal"
    RESIDUE_DERIVED = "residue-derived"

    @classmethod
    def parse(cls, name: str) -> "MainTermSource":
        key = name.strip().lower()
        aliases = {"paper": cls.PAPER_LITERAL, "residue": cls.RESIDUE_DERIVED}
        if key in aliases:
            return aliases[key]
        return cls(key)


class EnvelopeParams(BaseModel):
    """Parameters of E(t) = t^-1 exp(-(b - eps) L / ((log L)^alpha (log log L)^beta))"""
    model_config = ConfigDict(frozen=True)

    b: float = Field(0.0203, ge=0)
    alpha: float = Field(2 / 3, gt=0)
    beta: float = Field(1 / 3, gt=0)
    epsilon: float = Field(0.0, ge=0)

    @model_validator(mode="after")
    def check_margin(self):
        if self.b > 0 and self.b - self.epsilon <= 0:
            raise ValueError("b - epsilon must be positive")
        return self

    @property
    def rate(self) -> float:
        return self.b - self.epsilon


class MainTermForm(BaseModel):
    fn_id: ArithFunctionId
    description: str
    source: MainTermSource


_FACTOR = re.compile(r"^(loglog|log)(?:\^(\d+))?$")


class SlowlyVarying(BaseModel):
    """l(x) = (log x)^k (log log x)^m"""
    model_config = ConfigDict(frozen=True)

    k: int = Field(0, ge=0)
    m: int = Field(0, ge=0)

    @classmethod
    def parse(cls, text: str) -> "SlowlyVarying":
        """'1', 'log', 'log^2', 'loglog', 'log*loglog^2', ..."""
        text = text.replace(" ", "")
        if text in ("", "1"):
            return cls()
        powers = {"log": 0, "loglog": 0}
        for factor in text.split("*"):
            match = _FACTOR.match(factor)
            if not match:
                raise ValueError(f"unsupported slowly varying factor {factor!r}")
            powers[match.group(1)] += int(match.group(2) or 1)
        return cls(k=powers["log"], m=powers["loglog"])

    def __call__(self, x):
        x = mpmath.mpf(x)
        value = mpmath.log(x) ** self.k
        if self.m:
            value *= mpmath.log(mpmath.log(x)) ** self.m
        return value


class ProbeTable(BaseModel):
    """Columns and rows of one probe; values stay mpmath numbers until export"""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    name: str
    columns: List[str]
    rows: List[list] = []
    notes: Dict[str, str] = {}

    def column(self, name: str) -> list:
        i = self.columns.index(name)
        return [row[i] for row in self.rows]
