from typing import Any, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict


class FracsobBaseModel(BaseModel):
    """Base model for all fracsob value objects."""
    model_config = ConfigDict(
        populate_by_name=True,
        frozen=True,
        arbitrary_types_allowed=True,
    )


def readonly_array(value: Any, dtype: Optional[type] = float) -> np.ndarray:
    """Copy ``value`` into a numpy array and mark it read-only."""
    arr = np.array(value, dtype=dtype, copy=True)
    arr.flags.writeable = False
    return arr
