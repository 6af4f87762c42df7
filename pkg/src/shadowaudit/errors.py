"""Exception hierarchy shared across the toolchain.

Two broad families matter for exit-code policy: ``InputError`` covers
configuration and parse problems (CLI exit 2), ``EvalError`` covers
runtime evaluation failures that the audit turns into findings.
"""


class ShadowAuditError(Exception):
    pass


class InputError(ShadowAuditError):
    """A file, source text or configuration could not be understood."""


class EvalError(ShadowAuditError):
    """Evaluation of a formula or definition failed."""
