"""Inventory of the four families across the five tiers."""

from .families import FAMILY_DEFS
from .sampling import (DEFAULT_SAMPLES, DEFAULT_SEED, REFERENCE_STARTS, reference_start, rng,
                       sample_cartesian, sample_points)
from .spec import (COEFFICIENTS, FAMILIES, PDM_TIERS, POTENTIAL_TIERS, TIERS, BracketRelation,
                   Params, SystemSpec, ZProfile)
from .system import System, build_system, catalog_listing, evaluate, u_potential_identity_check

__all__ = [
    "FAMILY_DEFS", "DEFAULT_SAMPLES", "DEFAULT_SEED", "REFERENCE_STARTS", "reference_start", "rng", "sample_cartesian", "sample_points",
    "COEFFICIENTS", "FAMILIES", "PDM_TIERS", "POTENTIAL_TIERS", "TIERS", "BracketRelation",
    "Params", "SystemSpec", "ZProfile", "System", "build_system", "catalog_listing", "evaluate",
    "u_potential_identity_check",
]
