"""Laplace-domain 4x4 field solver for multilayer bi-anisotropic media.

The pipeline: build layer susceptibilities (``medium``), eliminate the
magnetization and reduce Maxwell's equations to a tangential 4x4 ODE per
transverse wavevector (``em_system``), eigen-decompose each layer's
generator (``modes``), match layer solutions across interfaces
(``stack``), and synthesize space/time fields (``synthesis``).
``oracles`` holds independent reference implementations used by the
test suite.
"""

__version__ = "0.1.0"

from .em_system import (Direction, LongitudinalCoeffs, MaxwellBlockSystem,
                        PropagationSystem, SourceJ, assemble_blocks,
                        derivative_pattern, eliminate_longitudinal,
                        recover_longitudinal, reduce_source, tangential_drive)
from .errors import (BianisoError, BranchPointError, ConfigError,
                     EliminationError, EvanescentIncidenceError,
                     ExponentOverflowError, LongitudinalPivotError,
                     MatchingError, ModeDegeneracyError, QuadratureError,
                     ResolutionError, StackGeometryError, StiffnessError)
from .medium import (ConstantSusceptibility, CouplingModel,
                     CouplingSusceptibility, EffectiveResponse, LorentzPole,
                     NoiseSources, PoleSusceptibility, ScalarEnvelopeCoupling,
                     Susceptibility, SusceptibilityValues, TabulatedCoupling,
                     VACUUM, elimination_comparison, eliminate_magnetization,
                     isotropic_dielectric, susceptibility_laplace,
                     susceptibility_time, transform_noise_sources)
from .modes import (DecayClass, ModeBasis, eigenmodes, spectral_projectors,
                    vacuum_modes, vacuum_propagation_matrix)
from .oracles import (OracleReport, compare, fresnel_airy, integrate_layer,
                      maxwell_residual)
from .stack import (IncidentAmplitudes, Layer, LayerStack, ScatterResult,
                    StackSolution, TIE_BREAK_EPS, general_solution,
                    match_slab, particular_solution, region_system,
                    scattering_basis, scattering_matrices, solve_with_sources)
from .synthesis import (FieldFrame, FreeSpaceAmplitudes, FreeSpaceDrive,
                        PlaneWaveMode, field_profile, free_space_drive,
                        initial_spectra, polarization_basis, time_reconstruct)
from .units import NORMALIZED, SI, Units, units_by_name

__all__ = [name for name in dir() if not name.startswith("_")]
