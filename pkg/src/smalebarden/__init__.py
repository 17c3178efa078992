"""Sasakian structures on Smale-Barden manifolds: classification, certified constructions and decisions."""

from __future__ import annotations

from .abelian import INF, BardenName, H2Data, gk_check, normalize
from .decide import (
    Status,
    Verdict,
    decide_negative_sasakian,
    decide_sasakian,
    decide_semiregular_sphere,
)
from .seifert import SeifertCertificate, invariants_of

__version__ = "0.1.0"

__all__ = [
    "INF", "BardenName", "H2Data", "SeifertCertificate", "Status", "Verdict", "decide_negative_sasakian",
    "decide_sasakian", "decide_semiregular_sphere", "gk_check", "invariants_of", "normalize",
]
