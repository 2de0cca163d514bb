"""Exception types shared across the package."""


class SketchConfigError(ValueError):
    """Invalid sketch dimensions or configuration."""


class SketchCompatibilityError(ValueError):
    """Operation combining sketches with different configurations."""


class DeserializationError(ValueError):
    """Malformed serialized sketch; message names the failing offset."""


class PartitionError(ValueError):
    """Block count does not evenly partition the sketch rows."""


class DegenerateSpecError(ValueError):
    """Random-sum specification with zero variance."""


class OracleBudgetError(RuntimeError):
    """Brute-force oracle would exceed its enumeration budget."""
