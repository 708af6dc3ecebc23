"""Orders of the groups around the center of C(V_n, omega).

Invertible objects of the center: p^n characters times the p^rad_dim central
elements whose beta-class vanishes.  Image of induction and, when omega_alt
is nondegenerate, the Brauer-Picard group:

    |BrPic| = p^(C(n,2) - n) * |Stab(omega)|

from 0 -> V_n -> wedge^2(V_n*) -> BrPic -> Stab(omega) -> 0.  Only orders
are reported; the extension itself is not determined.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb

from .errors import NondegenerateRequired
from .forms import radical
from .h3 import H3Class
from .stab import StabilizerReport, brute_force_stabilizer


@dataclass(frozen=True)
class CenterProfile:
    p: int
    n: int
    omega: H3Class
    rad_dim: int
    inv_center_order: int
    is_center_pointed: bool
    pt_is_lagrangian: bool

    def to_dict(self):
        return {"p": self.p, "n": self.n, "omega": str(self.omega), "rad_dim": self.rad_dim,
                "inv_center_order": self.inv_center_order, "is_center_pointed": self.is_center_pointed,
                "pt_is_lagrangian": self.pt_is_lagrangian}


@dataclass(frozen=True)
class BrPicReport:
    omega: H3Class
    profile: CenterProfile
    stab: StabilizerReport
    kernel_exponent: int
    induction_image_order: int
    brpic_order: int | None

    def to_dict(self):
        return {"profile": self.profile.to_dict(), "stab": self.stab.to_dict(),
                "kernel_exponent": self.kernel_exponent,
                "induction_image_order": self.induction_image_order, "brpic_order": self.brpic_order}


def center_profile(omega: H3Class) -> CenterProfile:
    p, n = omega.p, omega.n
    alt = omega.omega_alt
    rad_dim = len(radical(alt))
    return CenterProfile(p, n, omega, rad_dim, p ** (n + rad_dim), alt.is_zero(), rad_dim == 0)


def kernel_exponent(n, rad_dim):
    """dim wedge^2(V*) minus the rank of v -> iota_v(omega_alt)."""
    return comb(n, 2) - n + rad_dim


def _stab(omega, stab, **kwargs):
    return stab if stab is not None else brute_force_stabilizer(omega, **kwargs)


def induction_image_order(omega: H3Class, stab: StabilizerReport | None = None, **kwargs) -> int:
    """p^(C(n,2) - n + rad_dim) * |Stab(omega)|.  Extra keywords go to the brute-force search."""
    prof = center_profile(omega)
    return omega.p ** kernel_exponent(omega.n, prof.rad_dim) * _stab(omega, stab, **kwargs).order


def brpic_order(omega: H3Class, stab: StabilizerReport | None = None, **kwargs) -> int:
    prof = center_profile(omega)
    if prof.rad_dim:
        raise NondegenerateRequired(
            f"omega_alt has a {prof.rad_dim}-dimensional radical; the order formula needs it nondegenerate")
    return omega.p ** kernel_exponent(omega.n, 0) * _stab(omega, stab, **kwargs).order


def brpic_report(omega: H3Class, stab: StabilizerReport | None = None, require_nondegenerate=True,
                 **kwargs) -> BrPicReport:
    """Profile, stabilizer and orders in one pass (the stabilizer is computed once)."""
    prof = center_profile(omega)
    if prof.rad_dim and require_nondegenerate:
        raise NondegenerateRequired(
            f"omega_alt has a {prof.rad_dim}-dimensional radical; the order formula needs it nondegenerate")
    stab = _stab(omega, stab, **kwargs)
    kexp = kernel_exponent(omega.n, prof.rad_dim)
    ind = omega.p ** kexp * stab.order
    return BrPicReport(omega, prof, stab, kexp, ind, None if prof.rad_dim else ind)
