"""Exception hierarchy shared by every module."""


class SchemeCheckError(Exception):
    """Base class for all library errors."""


class MalformedInput(SchemeCheckError, ValueError):
    """An argument violates a documented precondition."""


class BudgetExceeded(SchemeCheckError):
    """A search or construction hit a configured budget.

    Never swallowed: callers see truncation instead of a partial answer.
    """


class HomSearchTruncated(BudgetExceeded):
    pass


class NotAUnit(SchemeCheckError, ValueError):
    """A hom fails to send some submonoid element to a unit."""

    def __init__(self, element: int, image: int):
        super().__init__(f"element {element} maps to {image}, which is not a unit")
        self.element = element
        self.image = image


class NotUnitIdeal(SchemeCheckError, ValueError):
    def __init__(self, ideal):
        super().__init__(f"elements do not generate the unit ideal; generated ideal = {ideal}")
        self.ideal = ideal


class PredicateFailure(SchemeCheckError, ValueError):
    """A supplied hom does not satisfy the localization predicate."""

    def __init__(self, slot, report):
        super().__init__(f"slot {slot}: localization predicate fails ({report.summary()})")
        self.slot = slot
        self.report = report


class CocycleFailure(SchemeCheckError, ValueError):
    def __init__(self, triple, open_set):
        i, j, k = triple
        super().__init__(f"cocycle condition fails for ({i},{j},{k}) on {sorted(map(str, open_set))}")
        self.triple = triple
        self.open_set = open_set
