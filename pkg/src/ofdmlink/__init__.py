"""Baseband OFDM link simulator for BER studies over AWGN and flat fading."""
from .channel import (
    ChannelSpec,
    FadingState,
    Family,
    apply_flat_fading,
    awgn,
    ebn0_to_noise_variance,
    fading_gains,
    rician_gains,
    snr_to_ebn0_db,
)
from .harness import (
    BerCurve,
    BerRecord,
    Comparison,
    StoppingRule,
    compare_curves,
    run_ber_point,
    run_sweep,
)
from .link import LinkConfig, TransmissionResult, constellation_capture, run_block
from .mapping import (
    ConfigError,
    Constellation,
    Mapping,
    Scheme,
    build_constellation,
    demap_hard,
    diff_decode,
    diff_encode,
    gray_decode,
    gray_encode,
    map_bits,
)
from .ofdm import OfdmConfig, fft, ifft, ofdm_demodulate, ofdm_modulate
from .rng import Streams, derive_seed, make_streams
from .theory import NoClosedForm, qfunc, theoretical_ber

__version__ = "0.1.0"
