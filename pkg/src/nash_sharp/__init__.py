"""Sharp L2-Nash constant, extremal profiles and penalized minimizers.

Core numerics live in ball_eigen, constants, extremal, functional and
minimizer; the service subpackage exposes them over HTTP and the cli
module is a thin command-line client of the same handlers.
"""

__version__ = "0.1.0"
