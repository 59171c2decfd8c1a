"""Nested unfolding segmentation and restoration for degraded images.

Images are float arrays in [0, 1] shaped (H, W) or (H, W, C); masks are (H, W).
Configs may be passed as dicts or JSON strings and use the same schema as the
`nun --config` file.
"""

import json

from . import _nun
from ._nun import (
    ShapeError,
    f_beta,
    m_dice,
    m_iou,
    mae,
    psnr,
    read_png,
    select_top_two,
    stage_weights,
    toy_sample,
    write_png,
)

__all__ = [
    "ShapeError",
    "default_config",
    "degrade",
    "f_beta",
    "m_dice",
    "m_iou",
    "mae",
    "psnr",
    "quality_score",
    "read_png",
    "segment",
    "segment_manifest",
    "select_top_two",
    "stage_weights",
    "toy_sample",
    "write_png",
]


def _text(cfg):
    if cfg is None:
        return ""
    return cfg if isinstance(cfg, str) else json.dumps(cfg)


def default_config():
    return json.loads(_nun.default_config())


def degrade(image, spec, seed=0):
    return _nun.degrade(image, _text(spec), seed)


def segment(image, config=None):
    return _nun.segment(image, _text(config))


def quality_score(image, config=None):
    return _nun.quality_score(image, _text(config))


def segment_manifest(manifest, out, config=None, threads=1):
    return _nun.segment_manifest(str(manifest), str(out), _text(config), threads)
