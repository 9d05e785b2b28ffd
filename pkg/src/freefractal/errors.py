"""Exception types shared across the library."""


class FreeFractalError(Exception):
    """Base class for all library errors."""


class ShapeMismatchError(FreeFractalError):
    """Matrix or tuple shapes are incompatible."""


class WordIndexError(FreeFractalError):
    """A word refers to a component outside the tuple's alphabet."""


class PlanInfeasibleError(FreeFractalError):
    """Quantile-plan selection cannot satisfy its cardinality bound at this k."""


class PlanSizeError(FreeFractalError):
    """Representation plan cannot be built: k is below the construction threshold."""


class SingletonOrbitError(FreeFractalError):
    """The unitary orbit of the tuple is a single point (all components scalar)."""


class EpsTooLargeError(FreeFractalError):
    """Requested orbit distance exceeds the reachable bracket along the path."""


class EmptyCloudError(FreeFractalError):
    """Point-cloud estimator called on an empty cloud."""


class DegenerateGridError(FreeFractalError):
    """Scale grid too small or too narrow for a scaling-exponent fit."""


class NonpositiveStatisticError(FreeFractalError):
    """Log-normalization requested for a statistic that is not positive."""


class ZeroHitsError(FreeFractalError):
    """Monte Carlo volume estimate got no hits; widen the box or add trials."""


class PackingPremiseError(FreeFractalError):
    """Packing scan does not certify the premise of the measure-transfer bound."""


class NonInjectiveMapError(FreeFractalError):
    """Polynomial is not injective on the spectrum it is applied to."""
