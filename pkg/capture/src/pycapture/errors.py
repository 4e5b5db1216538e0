"""Exception types for the capture shim.

Everything raised on purpose derives from CaptureError so the command line
driver can catch one base class.
"""


class CaptureError(Exception):
    """Base class for all errors raised by this package."""


# ---- marker grammar -------------------------------------------------------

class NoStartMarker(CaptureError):
    """Script contains no '# start smallset <variable>' line."""


class NoEndMarker(CaptureError):
    """Script contains no '# end smallset <variable>' line."""


class OutOfOrderMarker(CaptureError):
    """Markers appear in an order no capture run could produce."""


class MixedVariables(CaptureError):
    """Markers disagree on which variable they track."""


# ---- script execution -----------------------------------------------------

class VariableUndefined(CaptureError):
    """A marker names a variable the script has not defined at that point."""


class NotTabular(CaptureError):
    """The tracked variable is not a 2-D table when a marker observes it."""


class ScriptError(CaptureError):
    """User code raised while a segment was executing."""
