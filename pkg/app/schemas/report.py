from typing import Any, Dict, List, Optional

from pydantic import BaseModel

from app import __version__


class ReportBundle(BaseModel):
    """The JSON document every command writes"""
    command: str
    version: str = __version__
    config: Dict[str, Any]
    results: List[Dict[str, Any]] = []
    error_budgets: Dict[str, str] = {}
    timings: Optional[Dict[str, float]] = None

    def document(self) -> dict:
        return self.model_dump(exclude_none=True)
