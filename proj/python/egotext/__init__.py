"""Scene-text evaluation core: geometry, photometry, CER, matching and gaze windows.

Images are numpy uint8 arrays, HxW or HxWx3 in RGB order.
"""

from ._core import (
    __version__,
    adjust_brightness,
    align_gaze,
    cer,
    envelope,
    gaze_window,
    gaze_window_side,
    iou,
    lighting_stats,
    match_detections,
    merge_boxes,
    pearson,
    upscale,
)

__all__ = [
    "__version__",
    "adjust_brightness",
    "align_gaze",
    "cer",
    "envelope",
    "gaze_window",
    "gaze_window_side",
    "iou",
    "lighting_stats",
    "match_detections",
    "merge_boxes",
    "pearson",
    "upscale",
]
