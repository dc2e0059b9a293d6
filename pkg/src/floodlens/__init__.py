"""Flood detection in aerial images from color+texture segmentation and
an LBP-feature neural classifier."""

from .kernels import BACKEND

__version__ = "0.1.0"

__all__ = ["BACKEND", "__version__"]
