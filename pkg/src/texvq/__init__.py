"""Reduced-reference video quality toolkit.

Estimates a VMAF-like 0-100 quality score for a reconstructed video
against its original from three DCT-energy texture features and
frame-wise SSIM, fused by a single-layer LSTM model loaded from a
portable JSON file.
"""

from .evaluate import (
    BenchReport,
    EvalReport,
    ImportanceReport,
    ManifestEntry,
    bench_pipeline,
    feature_importance,
    load_manifest,
    mae,
    max_abs_dev,
    metric_correlation_matrix,
    pcc,
    run_eval,
)
from .fusion import (
    ResidualTriple,
    assemble_chunk_matrix,
    compute_residuals,
    lstm_forward,
    normalize_inputs,
    predict_chunk_score,
    score_segment,
)
from .metrics import FramePairScore, frame_psnr, frame_ssim, segment_pair_scores
from .model import (
    FEATURE_ORDER,
    FORMAT_VERSION,
    GATE_ORDER,
    LstmWeights,
    ModelBundle,
    ModelFormatError,
    load_model,
    save_model,
)
from .pipeline import PairResult, ScoreReport, StageTimings, score_pair, score_pair_frames
from .texture import (
    BlockGrid,
    FrameFeatures,
    block_texture_energy,
    dct2d_32,
    extract_segment_features,
    frame_features,
)
from .video_io import (
    Chunk,
    Frame,
    PairMismatchError,
    StreamInfo,
    VideoFormatError,
    chunk_segment,
    parse_y4m_header,
    read_y4m,
    read_yuv,
    validate_pair,
    write_y4m,
)

__version__ = "0.1.0"
