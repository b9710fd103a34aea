"""Exception types shared across the library."""


class RlraError(Exception):
    """Base class for library-specific failures."""


class RankCollapse(RlraError):
    """A sketch lost columns: a factorization inside a range finder produced
    exactly dependent columns, so the requested basis width cannot be met."""

    def __init__(self, achieved, requested):
        self.achieved = achieved
        self.requested = requested
        super().__init__(
            f"sketch rank collapse: {achieved} usable columns of {requested} requested"
        )


class IllPosedPseudoinverse(RlraError):
    """The matrix handed to a pseudoinverse solve is numerically rank-deficient."""


class IllConditionedSolve(RlraError):
    """A square solve inside a baseline scheme is too ill-conditioned to trust."""


class NotConverged(RlraError):
    """Adaptive rank search exhausted its sketch width above tolerance.

    Carries the partial outcome so the caller can restart with a wider sketch.
    """

    def __init__(self, outcome):
        self.outcome = outcome
        super().__init__(
            f"residual energy {outcome.residual_energy:.6e} above tolerance "
            f"at full sketch width {outcome.rank}"
        )


class Unsatisfiable(RlraError):
    """The restart schedule ran out of room: sketch width already at its cap."""
