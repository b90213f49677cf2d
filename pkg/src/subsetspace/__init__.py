"""Finite subset spaces X(n) of normed spaces.

Hausdorff geometry of finite point sets, Lipschitz and Hölder retractions
X(n) -> X(n-1), quasigeodesics, and a randomized verification harness.
"""

from .errors import (CapacityError, DomainError, NonConvergenceError, NotUniqueError,
                     PreconditionError)
from .flow import (FlowConfig, FlowResult, collision_time_bounds, flow_until, holder_bound,
                   holder_retraction, integrate_pair, integrate_to_collision)
from .fset import (FSet, TwoCenterWitness, cheb_center, diam, dist_to_x2, hausdorff, min_sep,
                   proximal_bijection)
from .harness import (Check, Report, RunConfig, estimate_holder, estimate_lipschitz,
                      sample_fset, sample_pair, verify)
from .kernels import BACKEND
from .norms import NormSpec, dual_norm, norm, norming_functional, radial, semi_inner
from .paths import (QuasiPath, geodesic_in_larger, path_eval, path_from_relation, path_length,
                    quasigeodesic, spaced_pair)
from .relations import Decomposition, Relation, decompose, proximal_relation, reduce
from .retract import PartitionOfUnity, interp3, interp_n, normalize, r2, r3, rn2
from .selector import SelectorConfig, hull_hausdorff, selector_retraction, steiner_point

__version__ = "0.1.0"
