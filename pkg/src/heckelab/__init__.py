"""Exact-arithmetic engine for affine Hecke algebras and their finite-group models."""

from heckelab.scalars import (
    CoeffPlusRule,
    Scalar,
    ScalarContext,
    abs2,
    coeffplus_select,
    conj,
    default_coeffplus_rule,
    half_power_of_p,
)

__all__ = [
    "CoeffPlusRule",
    "Scalar",
    "ScalarContext",
    "abs2",
    "coeffplus_select",
    "conj",
    "default_coeffplus_rule",
    "half_power_of_p",
]
