"""surrokit: FT surrogates, surrogate-based balancing, and saliency maps."""

from .balance import (
    BalanceConfig,
    Dataset,
    augment,
    record_holdout_split,
    repetition_counts,
    upsample,
)
from .classifiers import BandPowerClassifier, Classifier, NetworkClassifier
from .errors import InvalidInputError, NumericalError, ShapeError
from .evaluation import (
    ConfusionMatrix,
    EvaluationResult,
    alpha_sweep,
    conditional_confusion,
    evaluate,
)
from .network import (
    ArchitectureDescriptor,
    count_parameters,
    forward,
    full_architecture,
    infer_shapes,
    init_weights,
    reference_architecture,
)
from .saliency import SaliencyMap, SaliencySpec, surrogate_saliency, zero_out_saliency
from .signals import (
    Epoch,
    Signal,
    Spectrum,
    butterworth_lowpass,
    epoch_from_array,
    forward_dft,
    inverse_dft,
    resample,
)
from .surrogates import (
    IaaftReport,
    PartialSurrogateSpec,
    SurrogateConfig,
    epoch_surrogate,
    ft_surrogate,
    iaaft_surrogate,
    partial_ft_surrogate,
)
from .synthetic import SyntheticSpec, bundled_spec, generate_synthetic
from .training import TrainConfig, rmsprop_step, train_network, train_reference_classifier

__version__ = "0.1.0"
