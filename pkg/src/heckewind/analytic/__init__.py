"""Floating-point verification layer: special functions, Kloosterman sums,
eigen-systems and the quadratic forms built from them."""

from .forms import *  # noqa: F401,F403
from .kloosterman import *  # noqa: F401,F403
from .offdiag import *  # noqa: F401,F403
from .special import *  # noqa: F401,F403
