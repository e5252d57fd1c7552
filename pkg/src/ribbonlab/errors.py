"""Exception types raised across the package."""

from __future__ import annotations


class RibbonLabError(Exception):
    """Base class for all package errors."""


class ModelError(RibbonLabError):
    """Malformed graph or face-model data."""


class InvalidFace(ModelError):
    """A weight was stored on a quadruple violating the face condition."""


class SingularBlock(RibbonLabError):
    def __init__(self, source: str, target: str, condition: float):
        self.source = source
        self.target = target
        self.condition = condition
        super().__init__(f"block ({source}, {target}) is numerically singular (cond ~ {condition:.3g})")


class ClusterAmbiguity(RibbonLabError):
    def __init__(self, a: complex, b: complex, tol: float):
        self.pair = (a, b)
        self.tol = tol
        super().__init__(f"eigenvalue clusters {a:.6g} and {b:.6g} are closer than 10*tol = {10 * tol:.3g}")


class ZeroEigenvalue(RibbonLabError):
    def __init__(self, value: complex):
        self.value = value
        super().__init__(f"eigenvalue cluster {value:.3g} is zero within tolerance")


class NotClosable(RibbonLabError):
    def __init__(self, which: str, block: tuple[str, str], detail: str = ""):
        self.which = which
        self.block = block
        msg = f"{which} is not invertible on block {block}"
        super().__init__(msg + (f": {detail}" if detail else ""))


class MuZero(RibbonLabError):
    """q - 1/q vanishes, so the BMW generator e cannot be formed."""


class NotEnhanced(RibbonLabError):
    def __init__(self, side: str, residual: float, kind: str):
        self.side = side
        self.residual = residual
        self.kind = kind
        super().__init__(f"partial trace on the {side} side is {kind} (residual {residual:.3g})")


class NonInvertibleDrinfeld(RibbonLabError):
    pass


class BadParams(RibbonLabError):
    pass


class DimensionMismatch(RibbonLabError):
    pass


class ZeroUnknot(RibbonLabError):
    pass


class TooLarge(RibbonLabError):
    """Path space exceeds the dense-matrix guard."""
