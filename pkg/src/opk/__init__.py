"""Opetopes, opetopic sets and opetopic algebras."""

from .address import Address, concat, lex_compare, parse_address
from .opetope import (
    AR, PT, Opetope, OpetopeError, corolla, degenerate, enumerate_opetopes,
    from_table, graft, op_int, parse_opetope, readdress, source, substitute,
    target, total_graft, validate,
)

__version__ = "0.1.0"
