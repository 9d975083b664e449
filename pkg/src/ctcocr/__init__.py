"""CTC-based text transcription engine for word and line images.

A small numpy library covering the whole recognition stack: feature
extraction from grayscale images, four encoder configurations (raw-column
RNN, sliding-window RNN, CNN-only, CRNN), CTC loss and best-path decoding
with manual backpropagation, RMSProp training with validation-driven
checkpoint selection, ISRI-style evaluation metrics, a deterministic
synthetic word-image generator, and page-level OCR composition from
externally supplied detections.
"""

from .alphabet import Alphabet, Labelling
from .checkpoint import Checkpoint
from .ctc import (
    CtcLossResult,
    Posteriorgram,
    best_path_decode,
    collapse,
    ctc_loss,
    labelling_probability_bruteforce,
    min_frames,
    path_probability,
)
from .errors import (
    CapacityError,
    ConfigError,
    CtcOcrError,
    FormatError,
    InvalidInputError,
    MissingGlyphError,
    TrainingError,
)
from .imaging import (
    GrayImage,
    WindowConfig,
    extract_columns,
    extract_windows,
    mirror,
    normalize_height,
    preprocess,
)
from .manifest import Manifest, ManifestEntry
from .metrics import (
    EvalReport,
    char_accuracy,
    lcs_length,
    levenshtein,
    seq_accuracy,
    word_accuracy,
)
from .models import (
    CnnConfig,
    CnnFeatureMap,
    ModelConfig,
    Recognizer,
    RnnConfig,
    map_to_sequence,
    model_forward,
)
from .optim import RmsProp
from .pageocr import Box, DetectionSet, PageResult, parse_detections, recognize_page, score_page
from .synthgen import (
    CLEAN_STYLE,
    DEGRADED_STYLE,
    BitmapFontRenderer,
    JitterRanges,
    RenderSpec,
    generate_corpus,
    render,
    sample_spec,
)
from .trainer import TrainPlan, TrainResult, build_alphabet, evaluate, model_from_checkpoint, train

__all__ = [
    "Alphabet",
    "Labelling",
    "Posteriorgram",
    "CtcLossResult",
    "collapse",
    "path_probability",
    "labelling_probability_bruteforce",
    "ctc_loss",
    "best_path_decode",
    "min_frames",
    "GrayImage",
    "WindowConfig",
    "preprocess",
    "normalize_height",
    "mirror",
    "extract_columns",
    "extract_windows",
    "ModelConfig",
    "RnnConfig",
    "CnnConfig",
    "CnnFeatureMap",
    "Recognizer",
    "map_to_sequence",
    "model_forward",
    "RmsProp",
    "Checkpoint",
    "Manifest",
    "ManifestEntry",
    "TrainPlan",
    "TrainResult",
    "build_alphabet",
    "train",
    "evaluate",
    "model_from_checkpoint",
    "EvalReport",
    "levenshtein",
    "lcs_length",
    "char_accuracy",
    "seq_accuracy",
    "word_accuracy",
    "RenderSpec",
    "JitterRanges",
    "CLEAN_STYLE",
    "DEGRADED_STYLE",
    "BitmapFontRenderer",
    "sample_spec",
    "render",
    "generate_corpus",
    "Box",
    "DetectionSet",
    "PageResult",
    "parse_detections",
    "recognize_page",
    "score_page",
    "CtcOcrError",
    "InvalidInputError",
    "CapacityError",
    "FormatError",
    "ConfigError",
    "TrainingError",
    "MissingGlyphError",
]

__version__ = "0.1.0"
