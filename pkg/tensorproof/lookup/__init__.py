"""
tlookup: set-inclusion and function lookups over tensors
"""

from .tables import LookupTable, TableSpec, apply_function, function_table, pad_column, range_table
from .tlookup import (
    LookupClaims,
    LookupFragment,
    LookupProof,
    LookupStage,
    compute_multiplicities,
    function_lookup_prove,
    function_lookup_verify,
    prove_lookup,
    tlookup_prove,
    tlookup_setup,
    tlookup_verify,
    verify_lookup,
)

__all__ = [
    "LookupTable",
    "TableSpec",
    "apply_function",
    "function_table",
    "pad_column",
    "range_table",
    "LookupClaims",
    "LookupFragment",
    "LookupProof",
    "LookupStage",
    "compute_multiplicities",
    "function_lookup_prove",
    "function_lookup_verify",
    "prove_lookup",
    "tlookup_prove",
    "tlookup_setup",
    "tlookup_verify",
    "verify_lookup",
]
