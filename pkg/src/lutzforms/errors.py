"""Exception hierarchy shared across the package."""


class LutzFormsError(Exception):
    """Base class for all library errors."""


class IllFormedAtom(LutzFormsError):
    pass


class DomainPole(LutzFormsError):
    pass


class ChartMismatch(LutzFormsError):
    pass


class DegreeZero(LutzFormsError):
    pass


class BadAssignment(LutzFormsError):
    pass


class PoleOnRegion(LutzFormsError):
    pass


class NotTopDegree(LutzFormsError):
    pass


class ZeroVolume(LutzFormsError):
    pass


class VanishingForm(LutzFormsError):
    pass


class PathEscapedRegion(LutzFormsError):
    pass


class MaxStepsExceeded(LutzFormsError):
    pass


class NotTransverse(LutzFormsError):
    pass


class BadBlendRange(LutzFormsError):
    pass


class CurveThroughOrigin(LutzFormsError):
    pass


class PositivityNotFound(LutzFormsError):
    pass


class ProfileViolation(LutzFormsError):
    pass


class BadIndex(LutzFormsError):
    pass


class IllegalStep(LutzFormsError):
    pass


class UnknownConstruction(LutzFormsError):
    pass


class BadSlice(LutzFormsError):
    pass
