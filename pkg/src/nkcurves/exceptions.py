"""Exception types shared across the package."""


class PreconditionError(ValueError):
    """An operation was called with inputs violating its contract."""


class MeshQualityError(RuntimeError):
    """A mesh is too degenerate (zero-area face, broken combinatorics)."""


class DegenerateStructureError(RuntimeError):
    """A geometric structure degenerates at a sample point (e.g. vanishing form)."""


class StructureNotApplicableError(RuntimeError):
    """The requested check needs data the background does not carry."""
