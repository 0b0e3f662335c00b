"""Exception hierarchy shared by all maxdyn modules."""


class MaxDynError(Exception):
    """Base class for domain errors (the CLI maps these to exit code 1)."""


class InvalidGraph(MaxDynError, ValueError):
    """Malformed graph input: self-loop, out-of-range id, empty vertex set."""


class InvalidValuation(MaxDynError, ValueError):
    """Valuation of the wrong length or with non-positive entries."""


class NotStronglyConnected(MaxDynError):
    pass


class NotUndirected(MaxDynError):
    pass


class CapExceeded(MaxDynError):
    """A state-space or subset enumeration would exceed its configured cap."""


class BudgetExceeded(MaxDynError):
    """A brute-force search (automorphisms, cycles) exceeded its budget."""


class NonAbsorbingReachability(MaxDynError):
    """Some reachable chain state cannot reach an absorbing component."""
