"""Exception hierarchy for the auction library."""


class AuctionError(Exception):
    """Base class for every error raised by this package."""


class UnknownAgent(AuctionError, KeyError):
    def __init__(self, agent):
        super().__init__(agent)
        self.agent = agent

    def __str__(self):
        return f"unknown agent {self.agent!r}"


class NoActivatedBidder(AuctionError):
    """The profile has no activated agent that submitted a bid."""


class AmbiguousHighestBidder(AuctionError):
    """The top bid is shared, so the critical sequence is undefined."""


class NotCritical(AuctionError):
    pass


class InvalidDelta(AuctionError, ValueError):
    pass


class MalformedAttack(AuctionError, ValueError):
    pass


class BudgetExceeded(AuctionError):
    """An enumeration ran past its configured evaluation budget."""


class InstanceFormatError(AuctionError, ValueError):
    """A document does not follow the instance file format.

    ``path`` locates the offending field, e.g. ``agents.j1.valuation``.
    """

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}" if path else message)
        self.path = path
        self.message = message
