"""Exception hierarchy shared across the toolkit.

Every error raised by this package derives from :class:`SpacelabError`,
so callers can catch one type at the boundary and still discriminate
by subclass where it matters (the CLI maps subclasses to exit codes).
"""


class SpacelabError(Exception):
    """Base class for all toolkit errors."""


class ParseError(SpacelabError):
    """Raster header or payload is malformed (bad magic, truncated data)."""


class UnsupportedFormat(SpacelabError):
    """Raster is syntactically valid but outside the mandatory 8-bit path."""


class BoundsError(SpacelabError):
    """Crop rectangle falls partly or wholly outside the image."""


class EmptyInput(SpacelabError):
    """A sample window was empty."""


class ShapeError(SpacelabError):
    """Image or window dimensions are missing, mismatched, or too small."""


class DegenerateReference(SpacelabError):
    """The raw quality index is undefined for this input pair.

    Raised when either input is constant (zero variance, so the
    correlation term is 0/0) or both means are zero.  The all-black
    reference always lands here; use the stabilized index instead.
    """


class DomainError(SpacelabError):
    """Numeric argument outside its valid domain (e.g. aperture <= 0)."""


class CatalogError(SpacelabError):
    """Catalog file violates the documented schema."""


class QueryError(SpacelabError):
    """Catalog query references a key that no record carries."""


class ManifestError(SpacelabError):
    """Manifest text violates the documented grammar."""


class NameConventionError(SpacelabError):
    """Capture name carries no recognizable condition tokens."""


class IngestError(SpacelabError):
    """A capture's image could not be read, decoded, or prepared."""


class AnalysisError(SpacelabError):
    """Analysis preconditions violated (rejected manifest, missing groups)."""
