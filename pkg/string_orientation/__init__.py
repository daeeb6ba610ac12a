"""
Exact algebra behind the string orientation of tmf.
Formal group laws, symmetric cocycles, the theta function and the cube, level-1 modular
forms, the Witten genus and the Atkin operator, all over exact rings.
"""

from string_orientation.errors import StringOrientationError

__version__ = "1.0.0"

__all__ = ["StringOrientationError", "__version__"]
