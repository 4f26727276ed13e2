import json
import math
from enum import Enum
from pathlib import Path

import numpy as np
import pandas as pd

from blaschke_cyclicity import __version__
from blaschke_cyclicity.common.schema import ReportSchema
from blaschke_cyclicity.config import logger
from blaschke_cyclicity.core.policy import NumericPolicy


def jsonable(value):
    """
    Convert a report to plain JSON types.

    Complex numbers become [re, im] pairs, non-finite floats become None and
    numpy scalars and arrays become Python objects.
    """
    if isinstance(value, dict):
        return {str(k): jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return jsonable(value.tolist())
    if isinstance(value, Enum):
        return jsonable(value.value)
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (complex, np.complexfloating)):
        return [jsonable(value.real), jsonable(value.imag)]
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if math.isfinite(value) else None
    if isinstance(value, Path):
        return str(value)
    return value


def envelope(subcommand: str, seed: int, policy: NumericPolicy, result: dict) -> dict:
    """Wrap a result with the version, subcommand, seed and numeric policy."""
    return {
        ReportSchema.VERSION: f"v{__version__}",
        ReportSchema.SUBCOMMAND: str(subcommand),
        ReportSchema.SEED: seed,
        ReportSchema.POLICY: policy.to_dict(),
        ReportSchema.RESULT: result,
    }


def write_json(data: dict, path: Path) -> Path:
    """Write sorted, indented UTF-8 JSON. Equal inputs give identical bytes."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    text = json.dumps(jsonable(data), sort_keys=True, indent=2, ensure_ascii=False, allow_nan=False)
    path.write_text(text + "\n", encoding="utf-8")
    logger.info(f"Wrote {path}")
    return path


def write_csv(frame: pd.DataFrame, path: Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False, encoding="utf-8")
    logger.info(f"Wrote {path}")
    return path
