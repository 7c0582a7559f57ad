from typing import Any, Dict, List, Optional, Union

from pydantic import Field

from .base import FracsobBaseModel

Scalar = Union[float, int, str, bool, None]


class ReportRecord(FracsobBaseModel):
    """One experiment row of a CLI report."""
    experiment: str = Field(..., description="Experiment identifier")
    inputs: Dict[str, Scalar] = Field(default_factory=dict, description="Flat key -> value map of inputs and defaults")
    computed: Union[float, List[float]] = Field(..., description="Computed value(s)")
    oracle: Optional[Union[float, List[float]]] = Field(None, description="Expected value(s) or bound")
    rel_err: Optional[float] = Field(None, description="Relative error, or margin for inequalities")
    ok: bool
    runtime_ms: float = 0.0

    def flat(self, keys: List[str]) -> Dict[str, Any]:
        """Row in the fixed CSV/JSON column order."""
        row: Dict[str, Any] = {"experiment": self.experiment}
        for key in keys:
            row[key] = self.inputs.get(key, "")
        row["computed"] = self.computed
        row["oracle"] = self.oracle if self.oracle is not None else ""
        row["rel_err"] = self.rel_err if self.rel_err is not None else ""
        row["ok"] = self.ok
        row["runtime_ms"] = self.runtime_ms
        return row
