"""Optimal approximate designs under second-order least squares estimation."""

from ._kernels import BACKEND
from .analytic import (ThresholdSet, analytic_class_masses, analytic_measure, closed_form_inverse, l_function,
                       oracle_psi_closed_form, thresholds, u_t, xi_root)
from .combinatorics import (HadamardMatrix, IncidenceMatrix, bib_d1, bib_d2, bib_d3,
                            example1_measure, hadamard, measure_from_incidence,
                            reduced_support, verify_h_equivalence)
from .design_space import (DesignMeasure, DesignSpace, SpaceKind, class_measure,
                           collapse_to_classes, enumerate_binary,
                           enumerate_chemical_balance, uniform_measure)
from .errors import (CapacityError, ConstructionError, DegenerateDistributionError,
                     DomainError, InvalidMeasureError, SingularityError, SingularStartError,
                     SLSDesignError, UnsupportedOrderError)
from .information import (Criterion, ErrorMomentProfile, InformationSummary,
                          OptimalityReport, check_optimal, directional_derivative,
                          information, information_from_classes, moments_to_t, phi,
                          psi_values)
from .solver import SolverConfig, SolverResult, efficiency, relative_D_efficiency, solve

__version__ = "0.1.0"
