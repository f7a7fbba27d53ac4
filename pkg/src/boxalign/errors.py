"""Exception hierarchy shared by all boxalign modules."""


class BoxalignError(Exception):
    """Base class for all errors raised by this package."""


class DegenerateResultError(BoxalignError):
    """Clipping a box against the image produced zero width or height."""


class ParseError(BoxalignError):
    """A document is malformed (bad JSON, wrong field type, out-of-range value)."""


class SchemaError(BoxalignError):
    """A document is missing required keys."""


class ReferentialError(BoxalignError):
    """A record references an entity (image, category) that does not exist."""


class EmptyGroundTruthError(BoxalignError):
    """No ground-truth objects exist for the requested category set."""


class NonFiniteInputError(BoxalignError):
    """A loss function received NaN or infinity."""


class NonConvergenceError(BoxalignError):
    """Gradient descent did not reach the gradient tolerance within the
    iteration budget."""

    def __init__(self, message: str, final_gradient: float):
        super().__init__(message)
        self.final_gradient = final_gradient


class UnknownOptionError(BoxalignError):
    """A selection references an option outside the study's option set."""


class DegenerateTableError(BoxalignError):
    """Every row of a judgment table is constant; the test statistic is 0/0."""


class StudyCompleteError(BoxalignError):
    """The participant has answered every task in the study."""


class UnknownStudyError(BoxalignError):
    """No study with the requested id is registered."""


class InvalidSelectionError(BoxalignError):
    """A judgment's selection set is empty or names unknown candidates."""


class DuplicateSubmissionError(BoxalignError):
    """A (participant, task) pair already has a recorded judgment."""
