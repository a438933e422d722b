"""Exception hierarchy for the audit library.

Every error raised on purpose derives from FairauditError so the CLI can
map library failures to exit code 1 without catching bare Exception.
"""


class FairauditError(Exception):
    """Base class for all audit errors."""


class ConfigError(FairauditError):
    """Invalid configuration: unknown column, attribute, flag or option."""


class ParseError(FairauditError):
    """Malformed input data; message carries the offending row number."""


class SchemaError(FairauditError):
    """Value outside a declared domain, or an inconsistent input schema."""


class FieldRequirementError(FairauditError):
    """A record lacks a field the requested metric needs."""


class UsageError(FairauditError):
    """An operation was called with arguments its contract forbids."""
