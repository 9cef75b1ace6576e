"""Unraveling Reed-Solomon codes.

Library layout:
  gf          field and polynomial arithmetic over GF(2^b)
  grs         generalized Reed-Solomon codes (syndrome-kernel form)
  urs         URS construction, unravel/reravel, views, translation
  decoders    direct / independent / collaborative / fast-chipkill /
              device+1 decoding and the cascade policy
  reliability closed-form failure analytics, oracles, fault campaigns
  presets     DDR5 and GF(16) toy configurations
  cli         the `urscode` command
"""

from .gf import GF, ConfigurationError, field
from .grs import (
    DecodeOutcome,
    DecodeStatus,
    GrsCode,
    decode_bounded,
    encode_systematic,
    make_grs,
    min_distance_bruteforce,
    shorten,
    syndrome,
)
from .urs import (
    CollapsingMap,
    UrsCode,
    construct_urs,
    encode_recursive,
    enumerate_fibers,
    power_map,
    reravel,
    subspace_poly,
    syndrome_translation_matrix,
    unravel,
    unravel_along,
    view,
)
from .decoders import (
    DecodePolicy,
    Stage,
    decode_cascade,
    decode_collaborative,
    decode_direct,
    decode_fast_chipkill,
    decode_independent,
    decode_stereotyped_plus_one,
    default_policy,
    erase_column_syndrome,
)
from .reliability import (
    FaultModel,
    SimReport,
    bb_failure_rate,
    bb_miscorrection_bound,
    collaborative_radius,
    dense_miscorrection_rate,
    failure_weight,
    nearest_codeword_oracle,
    power_radius,
    run_campaign,
    wilson_interval,
)
from .presets import PRESETS, make_preset

__version__ = "0.1.0"
