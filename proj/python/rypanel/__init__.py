"""Panel-data econometrics engine: log-log panel regressions with pooled,
fixed-effects and random-effects estimators, Hausman model selection, and the
built-in regional study definitions.

The heavy lifting lives in the compiled ``_rypanel`` extension; this package
re-exports its surface.
"""

from ._rypanel import *  # noqa: F401,F403
from ._rypanel import __doc__ as _core_doc  # noqa: F401

__version__ = "0.1.0"
