"""Sharp multivariate Bernstein and Markov constants for symmetric convex bodies."""
from .convex_geometry import (HPolytope, LpBall, VPolytope, WitnessedConstant, cube, gauge,
                              octahedron, polar, sharp_constant, support_max, unit_ball,
                              width_diameter)
from .exp_type import ExpPair, RadialCosine, TrigPolynomial, check_bernstein
from .harness import RngConfig, random_body, random_poly, random_trig, run_campaign
from .polynomials import MultiPolynomial, WeightedBody, markov_check, ridge_cheb
from .report import Entry, VerificationReport

__version__ = "0.1.0"
