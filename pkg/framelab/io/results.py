"""
results.py - result writers
Sample tables as CSV, estimates, certificates and reports as JSON.
"""
import io
import json
import logging
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

import pandas as pd

from ..core.bounds import SAMPLE_COLUMNS, BoundCertificate, BoundEstimate
from ..core.config import ConfigManager, get_config

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


def samples_csv(estimate: BoundEstimate, config: ConfigManager = None) -> str:
    """The per-start sample table as CSV text, columns in the fixed order."""
    config = config or get_config()
    frame = estimate.samples.reindex(columns=SAMPLE_COLUMNS)
    buffer = io.StringIO()
    frame.to_csv(buffer, index=False, float_format=config.get_csv_float_format(),
                 lineterminator="\n")
    return buffer.getvalue()


def estimate_payload(
    estimate: BoundEstimate,
    certificates: Optional[List[BoundCertificate]] = None,
    ordering: Optional[Dict[str, Any]] = None,
) -> Dict[str, Any]:
    """JSON document of a bounds run."""
    payload = {"estimate": estimate.to_dict()}
    if certificates is not None:
        payload["certificates"] = [c.to_dict() for c in certificates]
    if ordering is not None:
        payload["ordering"] = ordering
    return payload


def to_json(obj: Dict[str, Any], config: ConfigManager = None) -> str:
    config = config or get_config()
    return json.dumps(obj, indent=config.get_json_indent(), ensure_ascii=False)


def write_text(text: str, filename: PathLike) -> Path:
    """Write text to a file, creating parent directories."""
    path = Path(filename)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(text if text.endswith("\n") else text + "\n")
    logger.info(f"Wrote {path}")
    return path


def write_json(obj: Dict[str, Any], filename: PathLike, config: ConfigManager = None) -> Path:
    return write_text(to_json(obj, config), filename)


def write_samples(estimate: BoundEstimate, filename: PathLike,
                  config: ConfigManager = None) -> Path:
    """Export the sample table; same seed and inputs give a byte-identical file."""
    path = write_text(samples_csv(estimate, config), filename)
    logger.info(f"Exported {len(estimate.samples)} samples to '{path}'")
    return path


def read_samples(filename: PathLike) -> pd.DataFrame:
    return pd.read_csv(filename)
