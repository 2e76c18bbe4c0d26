"""Moving-object detection via block-texture background modelling.

The package turns grayscale frame sequences into per-pixel motion masks,
scores them against ground truth, and derives lane-level traffic density
states from the masks. A per-pixel sigma-delta estimator is included as a
comparison baseline, and a synthetic-scene generator provides sequences
with exact ground truth for end-to-end verification.
"""

from .background import (
    DetectorParams,
    MotionMap,
    StationaryModel,
    TOLERANCE_SCALE,
    load_model,
    save_model,
    tolerance,
)
from .density import (
    DensityState,
    Roi,
    classify,
    label_components,
    lane_coverage,
)
from .frame_io import (
    Frame,
    FormatError,
    load_mask,
    load_sequence,
    read_image,
    read_y4m,
    rgb_to_gray,
    write_mask,
    write_pgm,
)
from .metrics import (
    ConfusionCounts,
    PsnrReport,
    accuracy,
    confusion,
    pixel_snr,
    precision_recall,
    sampling_sweep,
    video_psnr,
)
from .pipeline import BlockTextureDetector, SigmaDeltaDetector, make_detector
from .pixel_mask import rasterize
from .sigma_delta import SigmaDeltaState, sd_init, sd_step
from .texture import (
    BlockGridSpec,
    BlockTextureGrid,
    block_textures,
    directional_differences,
    haar_decompose,
    normalize_differences,
    texture_field,
    texture_vector,
)

__version__ = "0.1.0"

__all__ = [
    "BlockGridSpec",
    "BlockTextureDetector",
    "BlockTextureGrid",
    "ConfusionCounts",
    "DensityState",
    "DetectorParams",
    "Frame",
    "FormatError",
    "MotionMap",
    "PsnrReport",
    "Roi",
    "SigmaDeltaDetector",
    "SigmaDeltaState",
    "StationaryModel",
    "TOLERANCE_SCALE",
    "accuracy",
    "block_textures",
    "classify",
    "confusion",
    "directional_differences",
    "haar_decompose",
    "label_components",
    "lane_coverage",
    "load_mask",
    "load_model",
    "load_sequence",
    "make_detector",
    "normalize_differences",
    "pixel_snr",
    "precision_recall",
    "rasterize",
    "read_image",
    "read_y4m",
    "rgb_to_gray",
    "sampling_sweep",
    "save_model",
    "sd_init",
    "sd_step",
    "texture_field",
    "texture_vector",
    "tolerance",
    "video_psnr",
    "write_mask",
    "write_pgm",
]
