"""Exception types raised across the package."""


class ConstructionError(ValueError):
    """A construction parameter violates a hypothesis of the construction."""


class UnsupportedDimensionError(ConstructionError):
    pass


class InvalidProfileError(ConstructionError):
    pass


class RegularityError(ValueError):
    """A derivative beyond the exact-derivative order was requested."""


class PackingInfeasibleError(RuntimeError):
    """The placement strategy failed to find admissible centers."""


class EnumerationBudgetError(RuntimeError):
    def __init__(self, count, budget):
        super().__init__(
            f"non-resonance probe needs {count} candidates, budget is {budget}"
        )
        self.count = count
        self.budget = budget


class NoWitnessError(RuntimeError):
    pass
