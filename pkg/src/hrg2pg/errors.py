"""Exception types shared across the toolkit."""


class Hrg2PgError(Exception):
    """Base class for every error raised by this package."""


class SizeLimitError(Hrg2PgError):
    """A desk-scale bound (isomorphism edges, search budget, frontier) was exceeded."""


class BudgetError(SizeLimitError):
    pass


class FormatError(Hrg2PgError):
    """Syntax error in a grammar or graph file."""

    def __init__(self, message, line=None, source=None):
        self.line = line
        self.source = source
        where = ""
        if source:
            where += f"{source}:"
        if line is not None:
            where += f"{line}:"
        super().__init__(f"{where} {message}" if where else message)


class DerivationError(Hrg2PgError):
    """Hyperedge replacement applied to an incompatible edge."""


class TranslationError(Hrg2PgError):
    """A hypergraph could not be translated into positional form."""


class RealizationError(Hrg2PgError):
    """Positional relations are inconsistent (uniqueness breach)."""


class NotWellFormedError(Hrg2PgError):
    """A positional grammar violates well-formedness or chain-connectivity."""


class NormalizationError(Hrg2PgError):
    """No permutation plan was found within the budget."""

    def __init__(self, message, diagnostic=None):
        super().__init__(message)
        self.diagnostic = diagnostic or {}
