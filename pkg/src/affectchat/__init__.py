"""Emotion-aware multimodal dialogue pipeline and evaluation suite."""

__version__ = "0.1.0"

from .emotions import EMOTIONS, EmotionDistribution

__all__ = ["EMOTIONS", "EmotionDistribution", "__version__"]
