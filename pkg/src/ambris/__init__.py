"""Simulation of RIS-assisted ambient backscatter communication links."""

from .codebook import Codebook, PhaseGrid, build_codebook, compose_weights, phase_grid
from .errors import AmbrisError, ConfigError, ContractError, DomainError
from .fieldmap import FieldMap, map_peak, reflected_field_map
from .geometry import DeskGrid, RisGeometry, cell_centers
from .metrics import (
    BeamClass,
    BeamType,
    ber_from_contrast,
    check_coherence,
    classify_beam,
    coherent_delta,
    contrast_ref,
    contrast_ris,
    hotspot_delta,
    sigma_for_ber,
)
from .propagation import (
    AmplitudeLaw,
    ChannelSet,
    Scenario,
    build_channel_set,
    cascade_tag,
    path_channel,
    ris_cascade,
    total_g,
)
from .search import Quantizer, SearchResult, evaluate_grid, feedback_search, quantize

__version__ = "0.1.0"
