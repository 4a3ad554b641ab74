"""Battery state-of-health estimation from four discrete impedance points.

Workflow: measure (or synthesize) complex impedance at four well-separated
frequencies, invert the equivalent circuit in closed form to get the six
parameters [R0, R1, R2, Aw, C1, C2], and feed those as features to a
linear SoH regression. An online estimator recovers the impedance points
from sampled voltage/current waveforms via bandpass filtering and
quadrature demodulation.
"""

from .ecm import (
    FEATURE_NAMES,
    EcmParams,
    ImpedanceSample,
    Regime,
    ecm_impedance,
    reduced_impedance,
    soh_from_capacity,
    sweep,
    warburg_impedance,
)
from .extraction import (
    FitReport,
    FourPointSet,
    extract_params,
    fit_rmse,
    select_four_frequencies,
)
from .regression import (
    FeatureRow,
    Metrics,
    SohModel,
    evaluate,
    load_model,
    predict,
    save_model,
    split,
    split_by_cell,
    train,
)
from .dataset import (
    FeatureTable,
    Spectrum,
    build_feature_table,
    load_feature_table,
    load_spectrum_csv,
    load_waveform_csv,
    save_feature_table,
    write_spectrum_csv,
)
from .synth import AgingTrend, default_trend, gen_dataset, params_at
from .waveform import (
    BandpassSpec,
    Phasor,
    SignalFrame,
    bandpass,
    demodulate,
    estimate_impedance,
    make_excitation,
)

__version__ = "0.1.0"
