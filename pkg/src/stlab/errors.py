"""Exception types shared across the package."""


class NondegeneracyError(Exception):
    """A family/curve hypothesis fails: degenerate family, constant j, bad reduction."""


class RefusedError(Exception):
    """Computation exceeds a configured scale limit (oracle or table size)."""


class CacheError(Exception):
    """Trace-cache file is malformed, inconsistent, or belongs to another family."""
