"""Numerical workbench for Kähler cuts: radial potentials, reduced metrics and toric strata."""

from .circle import (CutChart, CutProblem, bundle_curvature, curvature_pack, einstein_residual,
                     make_chart, map_g, moment_map, orbit_crossing, reduced_form,
                     section_sigma, structure_constant, v_eff)
from .closed_forms import closed_form_example, example_problem
from .errors import KcutError
from .hermitian import (OneOneForm, PotentialField, ddbar, form_distance, positivity_check,
                        ricci_form)
from .potentials import ToricPotential, flat, fubini_study, make_potential, separable
from .radial import (RadialPotential, check_symplectic, invert_moment, make_radial,
                     moment_profile)
from .toric import (PolyhedralSet, TorusCutProblem, enumerate_faces, face_of, isotropy,
                    kempf_ness_solve, smoothness_check, stratum_label)

__version__ = "0.1.0"

__all__ = [
    "CutChart", "CutProblem", "KcutError", "OneOneForm", "PolyhedralSet", "PotentialField",
    "RadialPotential", "ToricPotential", "TorusCutProblem", "bundle_curvature",
    "check_symplectic", "closed_form_example", "curvature_pack", "ddbar", "einstein_residual",
    "enumerate_faces", "example_problem", "face_of", "flat", "form_distance", "fubini_study",
    "invert_moment", "isotropy", "kempf_ness_solve", "make_chart", "make_potential",
    "make_radial", "map_g", "moment_map", "moment_profile", "orbit_crossing",
    "positivity_check", "reduced_form", "ricci_form", "section_sigma", "separable",
    "smoothness_check", "stratum_label", "structure_constant", "v_eff",
]
