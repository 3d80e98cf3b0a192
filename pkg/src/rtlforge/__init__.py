"""rtlforge: closed-loop RTL optimization with dialectic agents and deterministic PPA evaluation."""

__version__ = "0.1.0"

from rtlforge.errors import RtlforgeError

__all__ = ["RtlforgeError", "__version__"]
