"""motkit: filament-bundle magnetostatics for compact magneto-optical traps."""

from .analysis import (GradientReport, SuitabilityTargets, SuitabilityVerdict,
                       find_field_zero, fit_gradients, jacobian_at,
                       mot_suitability)
from .errors import (ClearanceError, DegenerateFit, EmptySample,
                     InfeasibleStart, InvalidGeometry, InvalidInput,
                     MotKitError, ObjectiveEvaluationError, SingularPoint,
                     ZeroNotBracketed)
from .field import (EPS_SING, MU_0, FieldMap, FieldSample, field_at,
                    field_map_csv, sample_line, sample_plane, segment_field)
from .geometry import (COPPER, MATERIALS, TITANIUM_LIKE, ConductorSection,
                       Discretization, GeometrySpec, Material, Segment,
                       SegmentList, build, clearance_check, conductor_sections,
                       make_anti_helmholtz, make_compact_four, make_free_path,
                       make_ioffe_pritchard, make_loop, make_twisted_cage,
                       make_two_piece, path_length)
from .optimize import (ObjectiveSpec, OptResult, evaluate_design,
                       objective_from_reports, objective_value,
                       optimize_geometry)
from .power import (PowerReport, conductor_resistance, current_density,
                    joule_power, power_report,
                    required_heat_transfer_coefficient)
from .scaling import (ScalingFit, ScalingReport, scaling_report,
                      verify_scaling_numerically)

__version__ = "0.1.0"
