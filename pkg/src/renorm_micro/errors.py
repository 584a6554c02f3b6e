"""Exception and warning types raised across the package."""

from __future__ import annotations


class RenormMicroError(Exception):
    """Base class for every error raised by renorm_micro."""


# configuration / geometry
class DuplicatePoint(RenormMicroError):
    pass


class PointOutsideImpurity(RenormMicroError):
    pass


class RadiusOutOfRange(RenormMicroError):
    pass


class BoundaryDegenerate(RenormMicroError):
    """A vortex sits on or outside the unit circle where the closed forms blow up."""


class NotUnitDisk(RenormMicroError):
    """A disk-only closed form was called with a non-disk impurity."""


# series / Fourier
class TruncationOverflow(RenormMicroError):
    pass


class MismatchedTruncation(RenormMicroError):
    pass


# minimization
class ZeroDegree(RenormMicroError):
    pass


class DomainError(RenormMicroError):
    pass


class NoConvergence(RenormMicroError):
    pass


class WrongRegime(RenormMicroError):
    pass


# PDE oracle
class ResolutionTooCoarse(RenormMicroError):
    pass


class HoleOverlap(RenormMicroError):
    pass


class SolverDivergence(RenormMicroError):
    pass


class LoopCrossesHole(RenormMicroError):
    pass


# scenario runner
class ScenarioError(RenormMicroError):
    """Base of the runner errors; ``record()`` is the machine-readable form."""

    code = 1

    def __init__(self, message: str, scenario: str = "", detail: object = None):
        super().__init__(message)
        self.message = message
        self.scenario = scenario
        self.detail = detail

    def record(self) -> dict:
        return {"error": type(self).__name__, "scenario": self.scenario,
                "message": self.message, "detail": self.detail}


class ParseError(ScenarioError):
    code = 2


class ValidationError(ScenarioError):
    code = 3


class ComputeError(ScenarioError):
    code = 4


class NearBoundaryWarning(UserWarning):
    """Some |z_i| exceeds 1 - 1e-6; closed-form values behave like ln(1-|z|^2)."""


class NearCoincidentWarning(UserWarning):
    """Two vortices are closer than 1e-4; gradients are badly conditioned."""
