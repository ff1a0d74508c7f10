"""Numerical laboratory for plane domains swept by normal rays from a
convex core: embedded-boundary Dirichlet solves, level-set geometry,
isoperimetric audits, and Hausdorff-stability experiments."""

from .errors import (ConfigError, DegenerateProfile, DegenerateSlice,
                     EmptySetError, EmptyShell, GnpLabError, GridMismatch,
                     InclusionViolated, LevelOutOfRange, NonConvergence,
                     NonSimpleBoundary, RayMisses, SampleMismatch,
                     SingularSystem, VanishingGradient)
from .geometry import (ConvexBody, GnpDomain, ThicknessProfile,
                       constant_profile, disc_body, example_profile,
                       fourier_profile, is_star_shaped, make_domain,
                       polygon_body, segment_body, table_profile)
from .measures import (MeasureReport, convex_hull, hausdorff_distance,
                       measure_report, symmetric_difference_area,
                       thickness_tau, convexity_gap, gap_details,
                       lipschitz_constant_tau,
                       tau_norm)
from .oracle import RadialOracle, lambda1_disc, lambda1_rectangle
from .solver import (GradientField, Grid, ScalarField, SourceSpec,
                     boundary_gradient_magnitude, eigen_lambda1, gradient,
                     grid_from_bbox, solve_biharmonic_system, solve_poisson)
from .levelsets import (CurvatureSample, CurvatureSet, LevelSetSlice,
                        boundary_coupling, check_coarea, check_estimate_d,
                        check_first_order_detachment, check_green_per_slice,
                        check_strict_inclusion, check_thickness_ode,
                        curvature_on_slice, extract_slice, slice_star_shaped,
                        thickness_curve)
from .analysis import (BernoulliData, EnergyRecord, InequalityReport,
                       ShapeFunctionals, bernoulli_slice_data,
                       check_condition_CS, check_faber_krahn,
                       check_payne_rayner, check_upper_bound_u,
                       condition_cb_components, energy_and_variation,
                       fourier_family, fundamental_link_record,
                       shape_functionals, shell_energy, steiner_constants,
                       steiner_symmetrize, symmetrized_domain)
from .convergence import (ComparisonReport, ConvergenceReport, DomainSequence,
                          comparison_run, full_convergence_run,
                          levelset_convergence_run, measure_convergence_run,
                          realize_sequence, thickness_convergence_run)

__version__ = "0.1.0"
