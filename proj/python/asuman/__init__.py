from ._core import *  # noqa: F401,F403
from ._core import CSV_HEADER, AbsentData, RateParams, SimResult, SweepRow

__version__ = "0.1.0"
