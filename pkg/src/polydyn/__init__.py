"""Dynamics of holomorphic self-maps and automorphisms of the polydisc.

Classification (elliptic / parabolic / hyperbolic), normal forms of
automorphisms, Valiron and Abel functions, and orbit-based estimators of
the divergence rate and the step.
"""

from polydyn.geometry import DomainError, cayley, cayley_inv, dist_disc, dist_halfplane, dist_poly
from polydyn.moebius import ClassificationError, MoebiusH, MoebiusHtoD, classify
from polydyn.polyauto import CycleAuto, PolydiscAuto, classify_auto, cycle_decompose, gamma_products
from polydyn.normalform import NormalForm, normal_form_auto, normal_form_cycle, verify_conjugacy
from polydyn.funceq import AbelFunction, KindError, ValironFunction, abel_for_auto, valiron_for_auto
from polydyn.dynamics import (
    HoloSelfMap,
    OrbitStats,
    builtin_intro_example,
    builtin_remark5_example,
    classify_selfmap,
    estimate_divergence_rate,
    estimate_step,
)

__all__ = [
    "AbelFunction",
    "ClassificationError",
    "CycleAuto",
    "DomainError",
    "HoloSelfMap",
    "KindError",
    "MoebiusH",
    "MoebiusHtoD",
    "NormalForm",
    "OrbitStats",
    "PolydiscAuto",
    "ValironFunction",
    "abel_for_auto",
    "builtin_intro_example",
    "builtin_remark5_example",
    "cayley",
    "cayley_inv",
    "classify",
    "classify_auto",
    "classify_selfmap",
    "cycle_decompose",
    "dist_disc",
    "dist_halfplane",
    "dist_poly",
    "estimate_divergence_rate",
    "estimate_step",
    "gamma_products",
    "normal_form_auto",
    "normal_form_cycle",
    "valiron_for_auto",
    "verify_conjugacy",
]

__version__ = "0.1.0"
