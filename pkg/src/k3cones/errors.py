"""Exception hierarchy.

Every domain error derives from :class:`K3ConesError`; the CLI maps these to
exit code 1 and prints the class name on stderr.
"""


class K3ConesError(Exception):
    """Base class for domain errors."""

    @property
    def name(self):
        return type(self).__name__


class OddDegree(K3ConesError, ValueError):
    pass


class InvalidDegree(K3ConesError, ValueError):
    pass


class NonPositiveSquare(K3ConesError, ValueError):
    pass


class NotPrimitive(K3ConesError, ValueError):
    pass


class PerfectSquare(K3ConesError, ValueError):
    pass


class DegenerateForm(K3ConesError, ValueError):
    pass


class EmptyPullbackLine(K3ConesError):
    pass


class NoWitness(K3ConesError, ValueError):
    pass


class UnstableEnumeration(K3ConesError):
    pass


class DualityMismatch(K3ConesError):
    pass


class IrrationalBoundary(K3ConesError):
    """A cone boundary is an irrational isotropic direction."""


class NotRigid(K3ConesError, ValueError):
    pass


class BadModuliVector(K3ConesError, ValueError):
    pass


class NoRigidVector(K3ConesError, ValueError):
    pass


class NotInComplement(K3ConesError, ValueError):
    pass
