"""Exception hierarchy shared by all modules."""


class HomSchemeError(Exception):
    """Base class for every error raised by this package."""


class ParseError(HomSchemeError, ValueError):
    pass


class CycleDetected(HomSchemeError, ValueError):
    """The reflexive-transitive closure of the given covers is not antisymmetric."""


class UnknownLabel(HomSchemeError, KeyError):
    pass


class InvalidPoset(HomSchemeError, ValueError):
    pass


class EmptyCarrier(HomSchemeError, ValueError):
    pass


class ElementNotInSet(HomSchemeError, ValueError):
    pass


class OverlappingCarriers(HomSchemeError, ValueError):
    pass


class NotInjective(HomSchemeError, ValueError):
    pass


class DisjointnessViolated(HomSchemeError, ValueError):
    pass


class NotAnOrdinalSum(HomSchemeError, ValueError):
    pass


class PremiseFailed(HomSchemeError):
    pass


class CycleConditionViolated(HomSchemeError):
    """``a != a'`` does not imply ``g(f(a, b)) != g(f(a', b))``."""


class FirstComponentNotInjective(HomSchemeError):
    """A product scheme's first output component does not separate first inputs."""


class ConstantsNotPreserved(HomSchemeError):
    """A product scheme maps a constant first component to a non-constant one."""


class CatalogNotDualClosed(HomSchemeError):
    pass


class MissingComponentPoset(HomSchemeError, KeyError):
    pass


class OutsideCatalog(HomSchemeError, KeyError):
    pass


class InvariantViolated(HomSchemeError, AssertionError):
    """An intermediate fact that a construction guarantees did not hold."""


class BoundTooLarge(HomSchemeError, ValueError):
    pass


class ResourceLimit(HomSchemeError):
    """Base for errors that signal an exhausted budget or size cap."""


class SearchBudgetExceeded(ResourceLimit):
    pass


class EvSizeCapExceeded(ResourceLimit):
    pass


class ComplexityCapExceeded(ResourceLimit):
    pass
