"""Stabilizers of 3-cocycles on elementary abelian p-groups and the Brauer-Picard orders they determine."""

from .brpic import BrPicReport, CenterProfile, brpic_order, brpic_report, center_profile, induction_image_order
from .extraspecial import ExtraSpecialSpec, expected_result, kappa_class, omega_class
from .forms import SymForm, Sym3Coset, WedgeForm, gl_act_sym, gl_act_wedge, interior_derivation, radical
from .gfp import FpVector, PrimeField, PrimeFieldMatrix, gl_enumerate, gl_order
from .h3 import (H2FpClass, H3Class, H3FpClass, beta_map, connecting_delta, cup_x0, explicit_representative,
                 gl_act_h3, h3_dim, project_to_kx, two_cocycle_class)
from .lie import LieAlgebraFp, MetricForm, ad_matrix, autm_stab_report, killing_form, omega_from_metric
from .stab import StabilizerReport, brute_force_stabilizer, closure, named_order, stabilizes

__version__ = "0.1.0"
