"""CNF encodings and projected AllSAT enumeration of short partial assignments."""
from cnfenum.formula import FormulaStore, Kind, NodeId, Polarity, Truth, residual, size
from cnfenum.parser import ParseError, parse
from cnfenum.transform import (
    CnfEncoding,
    Encoding,
    encode,
    encode_demorgan,
    encode_nnf_pg,
    encode_pg,
    encode_tseitin,
    to_nnf,
)

__all__ = [
    "CnfEncoding",
    "Encoding",
    "FormulaStore",
    "Kind",
    "NodeId",
    "ParseError",
    "Polarity",
    "Truth",
    "encode",
    "encode_demorgan",
    "encode_nnf_pg",
    "encode_pg",
    "encode_tseitin",
    "parse",
    "residual",
    "size",
    "to_nnf",
]
