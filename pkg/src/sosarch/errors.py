"""Exception hierarchy shared across the package."""


class SosArchError(Exception):
    """Base class for all package errors."""


class ParseError(SosArchError):
    """A scenario document could not be parsed."""


class ValidationError(SosArchError):
    """An input violates a documented invariant.

    ``violations`` carries every problem found, not just the first.
    """

    def __init__(self, violations):
        if isinstance(violations, str):
            violations = [violations]
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


class FormatError(SosArchError, ValueError):
    """A genome string has the wrong length or non-binary characters."""


class InfeasiblePrefix(SosArchError):
    """No feasible genome extends the given prefix."""


class RepairFailure(SosArchError):
    """A genome could not be mapped into the feasible set."""


class InfeasibleGenome(SosArchError):
    """An objective was requested for a genome that violates constraints."""


class DegenerateScenario(SosArchError):
    """Normalization scales collapse to zero for this scenario."""


class WeightError(SosArchError, ValueError):
    """Fitness weights are outside their intervals or off the simplex."""


class NoFeasibleWeights(SosArchError):
    """Weight intervals admit no point on the unit simplex."""


class InitFailure(SosArchError):
    """The initial population could not be built."""


class EmptyPopulation(SosArchError):
    """An operator received a population with no members."""


class TooLarge(SosArchError):
    """The exhaustive oracle refuses genomes above its bit cap."""
