"""
framelab.io - JSON specifications and result files
"""
from .codec import (
    decode,
    encode,
    function_from_dict,
    function_to_dict,
    load_json,
    load_measure,
    load_spec,
    measure_from_dict,
    measure_to_dict,
    spectrum_from_dict,
    spectrum_to_dict,
)
from .results import (
    estimate_payload,
    read_samples,
    samples_csv,
    to_json,
    write_json,
    write_samples,
    write_text,
)

__all__ = [
    "decode",
    "encode",
    "function_from_dict",
    "function_to_dict",
    "load_json",
    "load_measure",
    "load_spec",
    "measure_from_dict",
    "measure_to_dict",
    "spectrum_from_dict",
    "spectrum_to_dict",
    "estimate_payload",
    "read_samples",
    "samples_csv",
    "to_json",
    "write_json",
    "write_samples",
    "write_text",
]
