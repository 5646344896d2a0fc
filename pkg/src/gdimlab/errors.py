"""Exception hierarchy shared by every gdimlab module."""


class GdimlabError(Exception):
    pass


class InputError(GdimlabError, ValueError):
    """Malformed or out-of-hypothesis input."""


class DimensionError(InputError):
    pass


class SchemaError(InputError):
    """JSON artifact does not match the expected schema or breaks an invariant."""


class SearchExhausted(GdimlabError):
    pass


class NotAComplex(GdimlabError):
    pass


class CertificateRejected(GdimlabError):
    pass


class ConstructionError(GdimlabError):
    """A construction violated an identity that should hold by theory."""


class FieldTooSmall(GdimlabError):
    pass
