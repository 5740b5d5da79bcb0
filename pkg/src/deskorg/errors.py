"""Exception types raised across the toolkit."""


class DeskOrgError(Exception):
    """Base class for all toolkit errors."""


class DegenerateInput(DeskOrgError, ValueError):
    pass


class TooFewPoints(DeskOrgError, ValueError):
    pass


class NoConsensus(DeskOrgError):
    pass


class UnsupportedCategory(DeskOrgError, ValueError):
    pass


class UnknownCategory(DeskOrgError, ValueError):
    pass


class NoSupport(DeskOrgError):
    pass


class EdgeUnreachable(DeskOrgError):
    pass


class InfeasibleThickness(DeskOrgError):
    pass


class OffsetOutOfRange(DeskOrgError, ValueError):
    pass


class CyclicSupport(DeskOrgError):
    pass


class InvalidScene(DeskOrgError, ValueError):
    pass


class StalePlanError(DeskOrgError):
    pass


class NoOverhang(DeskOrgError):
    pass


class NothingInHand(DeskOrgError):
    pass


class UnknownSpec(DeskOrgError, ValueError):
    pass
