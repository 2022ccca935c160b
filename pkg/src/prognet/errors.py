"""Exception hierarchy.

Every error carries a ``category`` used by the command line to print a
one-line machine-readable message and pick an exit status.
"""


class PrognetError(Exception):
    category = "data"


class ConfigError(PrognetError):
    category = "config"


class InputIOError(PrognetError):
    category = "io"


class ConvergenceError(PrognetError):
    category = "convergence"


# ingest
class TaxonomyError(PrognetError):
    pass


class UnknownSector(PrognetError):
    pass


class NegativeValue(PrognetError):
    pass


class MalformedRow(PrognetError):
    pass


class EmptyPanel(PrognetError):
    pass


class LayerConflict(PrognetError):
    pass


class NoCommonCountries(PrognetError):
    pass


class NoCommonYears(PrognetError):
    pass


# rca
class YearNotInPanel(PrognetError):
    pass


class RangeOutsidePanel(PrognetError):
    pass


# assist
class CountryAxisMismatch(PrognetError):
    pass


class EmptySourceSet(PrognetError):
    pass


class SourceNotActive(PrognetError):
    pass


# nullmodel
class EmptyMatrix(PrognetError):
    pass


class IterationLimit(ConvergenceError):
    pass


# network / density
class InsufficientYears(PrognetError):
    pass


class EmptyNetwork(PrognetError):
    pass


class UnknownCountry(PrognetError):
    pass
