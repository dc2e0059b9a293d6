"""Exception types shared across the pipeline."""


class FloodlensError(Exception):
    """Base class for all floodlens errors."""


class ImageTooSmall(FloodlensError):
    pass


class DecodeError(FloodlensError):
    pass


class DimensionMismatch(FloodlensError):
    pass


class NotNormalized(FloodlensError):
    pass


class TooFewPoints(FloodlensError):
    pass


class InvalidK(FloodlensError):
    pass


class EmptyReference(FloodlensError):
    pass


class EmptyMask(FloodlensError):
    pass


class EmptyDataset(FloodlensError):
    pass


class UnpairedImage(FloodlensError):
    pass


class UnknownClassFolder(FloodlensError):
    pass


class EmptyEvaluation(FloodlensError):
    pass


class InvalidDropout(FloodlensError):
    pass


class FormatError(FloodlensError):
    pass


class ShapeError(FloodlensError):
    pass
