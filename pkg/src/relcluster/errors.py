"""Exception hierarchy for relcluster."""


class RelClusterError(Exception):
    """Base class for all relcluster errors."""


class ParseError(RelClusterError):
    """A CSV cell could not be parsed as a finite number."""


class SchemaError(RelClusterError):
    """Config/schema validation failure (missing column, unknown relation, ...)."""


class NotATreeError(RelClusterError):
    """The declared join edges do not form a tree spanning all relations."""


class CyclicQueryError(RelClusterError):
    """Some attribute's relations are not connected in the join tree.

    This is the rejection path for cyclic queries; the engine only handles
    acyclic joins.  Pre-materialize decomposition bags externally if needed.
    """


class BoxArityError(RelClusterError):
    """Box dimensionality does not match the clustering attributes."""


class EmptyRangeError(RelClusterError):
    """Sampling was requested from an empty range."""


class GeometryError(RelClusterError):
    """Invalid region geometry (e.g. hole not inside the outer box)."""


class InternalGeometryError(RelClusterError):
    """Midpoint-box arithmetic violated an invariant; indicates a bug."""


class EmptyJoinError(RelClusterError):
    """The join result is empty where a non-empty one is required."""


class ExpandOnLeafError(RelClusterError):
    """Attempted to expand a unit leaf of the decomposition tree."""


class EmptyActiveSetError(RelClusterError):
    """All points are inactive; the requested oracle needs a live point."""


class TokenError(RelClusterError):
    """A snapshot token was used with a tree it does not belong to."""


class DomainError(RelClusterError):
    """Argument outside the operation's domain (negative radius, bad k, ...)."""


class RankError(RelClusterError):
    """Pairwise-distance rank out of range."""


class NoCandidateError(RelClusterError):
    """No candidate point exists outside the given set."""


class TooLargeError(RelClusterError):
    """Instance too large for an exhaustive computation."""


class ForeignSampleError(RelClusterError):
    """A sample fell outside the declared support."""
