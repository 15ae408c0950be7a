"""Training pipeline for the texvq LSTM fusion model.

Consumes per-frame feature CSVs (or pre-assembled chunk CSVs) plus
ground-truth scores, trains the LSTM + dense regression with MAE loss
and Adam, and exports the portable model file together with
forward-pass parity vectors.
"""

from .dataset import (
    PairRecord,
    SplitSpec,
    TrainingExample,
    assemble_pair_matrices,
    build_dataset,
    examples_from_assembled,
    load_assembled_csv,
    load_feature_csv,
    load_pair_record,
    load_ssim_csv,
    load_targets_csv,
    split_examples,
)
from .export import (
    ExportError,
    export_model,
    export_result,
    export_test_vectors,
    import_model,
    model_document,
)
from .network import (
    Adam,
    NetworkParams,
    forward,
    init_params,
    loss_and_gradients,
    mae_loss,
    predict,
)
from .training import (
    Hyperparams,
    NormStats,
    TrainingDivergedError,
    TrainResult,
    compute_norm_stats,
    retrain_reference,
    train_model,
    tune,
)

__version__ = "0.1.0"
