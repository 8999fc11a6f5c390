"""Exception hierarchy shared across the package.

Exit-code mapping used by the CLI: input/validation errors exit with 2,
domain/branch errors with 3, failed verification checks with 1.
"""


class GkzError(Exception):
    """Base class for all package errors."""


class InputError(GkzError):
    """Invalid input data (maps to CLI exit code 2)."""


class DomainError(GkzError):
    """Evaluation requested outside the admissible domain (CLI exit code 3)."""


class RankDeficient(InputError):
    pass


class SingularModulus(InputError):
    pass


class SingularSimplex(InputError):
    pass


class LatticeNotSaturated(InputError):
    pass


class IncompleteRepresentatives(InputError):
    pass


class RepresentativesNotFound(InputError):
    def __init__(self, bound, found=None, needed=None):
        self.bound = bound
        self.found = found
        self.needed = needed
        msg = f"fewer classes than required reachable within degree bound {bound}"
        if found is not None and needed is not None:
            msg += f" (found {found} of {needed})"
        super().__init__(msg)


class DegenerateWeights(InputError):
    pass


class DimensionTooLarge(InputError):
    pass


class BranchCut(DomainError):
    pass


class PoleHit(DomainError):
    pass


class TailNotConverged(DomainError):
    pass


class QuadratureNotConverged(DomainError):
    pass


class OrderTooHigh(InputError):
    pass


class IllConditioned(GkzError):
    pass
