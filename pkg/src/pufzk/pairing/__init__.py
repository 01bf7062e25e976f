"""Bilinear group arithmetic over the BLS12-381 parameter set."""

from .curve import DecodeError
from .group import (
    CONTEXT,
    ORDER,
    SCALAR_ENC_LEN,
    GT_ENC_LEN,
    DomainTag,
    G1Element,
    G2Element,
    GtElement,
    PairingContext,
    Scalar,
    hash_to_g1,
    hash_to_scalar,
    multi_pair,
    pair,
)

__all__ = [
    "CONTEXT",
    "ORDER",
    "SCALAR_ENC_LEN",
    "GT_ENC_LEN",
    "DecodeError",
    "DomainTag",
    "G1Element",
    "G2Element",
    "GtElement",
    "PairingContext",
    "Scalar",
    "hash_to_g1",
    "hash_to_scalar",
    "multi_pair",
    "pair",
]
