"""Multi-well condensate dynamics and reduced-model laboratory.

Thin package front for the compiled _gpelab module; see the project README
for the CLI and configuration format.
"""

from _gpelab import *  # noqa: F401,F403
from _gpelab import __doc__  # noqa: F401
