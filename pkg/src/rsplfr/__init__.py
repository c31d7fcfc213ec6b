"""Cache-aided scalar linear function retrieval from MDS-coded servers.

Library layout:

* :mod:`rsplfr.gf`       -- finite fields GF(q)
* :mod:`rsplfr.mds`      -- (H, L) MDS codes over those fields
* :mod:`rsplfr.pda`      -- placement delivery arrays
* :mod:`rsplfr.scheme`   -- the four protocol variants end to end
* :mod:`rsplfr.oracle`   -- exhaustive security/privacy verification
* :mod:`rsplfr.tradeoff` -- exact memory-load curves and bounds
* :mod:`rsplfr.netsim`   -- message-level simulation with unavailability
* :mod:`rsplfr.cli`      -- the `rsplfr` command
"""

from .gf import (FieldElement, FieldSpec, field_new, FieldError,
                 FieldMismatch, DivisionByZero, UnsupportedCardinality)
from .mds import (MdsCode, custom_code, decode, encode, is_mds,
                  vandermonde_code, FieldTooSmall, NotMds)
from .pda import Pda, STAR, man_pda, parameters, validate, format_pda, parse_pda
from .scheme import (Library, SchemeConfig, SchemeRun, Variant,
                     make_query, measured_tradeoff, placement, robust_decode,
                     run_scheme, select_independent_set, server_delivery)
from .netsim import Scenario, Transcript, extract_adversary_view, simulate
from .presets import micro_config, preset_config, toy_config

__all__ = [
    "FieldElement", "FieldSpec", "field_new", "FieldError", "FieldMismatch",
    "DivisionByZero", "UnsupportedCardinality",
    "MdsCode", "custom_code", "decode", "encode", "is_mds",
    "vandermonde_code", "FieldTooSmall", "NotMds",
    "Pda", "STAR", "man_pda", "parameters", "validate", "format_pda",
    "parse_pda",
    "Library", "SchemeConfig", "SchemeRun", "Variant", "make_query",
    "measured_tradeoff", "placement", "robust_decode", "run_scheme",
    "select_independent_set", "server_delivery",
    "Scenario", "Transcript", "extract_adversary_view", "simulate",
    "micro_config", "preset_config", "toy_config",
]

__version__ = "0.1.0"
