"""Exact maximum admission for HFS and FCS."""
from .lpformat import export_lp, lp_text, parse_lp
from .model import IlpModel, Row, Var, build_fcs_model, build_hfs_model
from .oracle import OracleScaleError, brute_force_oracle
from .solve import ExactResult, solve

__all__ = [
    "ExactResult",
    "IlpModel",
    "OracleScaleError",
    "Row",
    "Var",
    "brute_force_oracle",
    "build_fcs_model",
    "build_hfs_model",
    "export_lp",
    "lp_text",
    "parse_lp",
    "solve",
]
