"""Good reduction of Drinfeld modules and A-motives via local shtukas."""

from .config import BaseConfig, config_for_q
from .errors import (DimensionMismatch, IllegalDirection, NotAUnit, NotDistinguishedDivisor, NotFree,
                     PairInvariantViolated, ParseError, PrecisionExhausted, PreconditionError,
                     RankDeficient, ShtukaError, TruncationUnsound, VerificationFailed)
from .series import (BiSeries, RingTag, divides, frobenius_decompose, frobenius_recompose,
                     poly_divmod, tate_divmod, weierstrass_divide, weierstrass_factor)
from .linalg import Mat, SNFRing, SmithForm, adjugate, check_equivariant, det, smith_normal_form
from .lattice import column_reduce_to_basis, minimal_N, pi_digit_kernel
from .motives import (CokerReport, FMod, ModelData, base_change, coker_analysis, effectivity_check,
                      is_strong_good_model, is_weak_good_model, reduce_mod_pi)
from .drinfeld import (Bad, DrinfeldModule, Good, TwistedPoly, build_good_model, drinfeld_motive,
                       good_reduction_test, twisted_mul)
from .shtuka import (LocalShtuka, PairIso, associate_shtuka, canonical_pair, criterion_check,
                     lattice_equal, reconstruct_model)

__version__ = "0.1.0"
