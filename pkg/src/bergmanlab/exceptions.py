class DomainError(ValueError):
    """Argument outside the mathematical domain of an operation."""


class ParameterError(ValueError):
    """Structurally invalid parameter combination."""


class AssemblyError(RuntimeError):
    """Matrix assembly failed, typically a divergent density quadrature."""


class ConstructionError(RuntimeError):
    """A geometric construction could not satisfy its invariants."""
