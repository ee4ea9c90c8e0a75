"""Exact combinatorics of the two cone compactifications of a simplicial fan.

The package builds the simplex at infinity and the real toroidal boundary
of a finite fan, their least common modification (full and excentric), the
fiber formulas relating them, and the group-action and homology checks
around them.  A sampling oracle for curve limits cross-checks the closed
forms independently.
"""

from .errors import DualFanError, InputError, ViolationError
from .fan import Fan, validate_fan
from .homology import ProductCell, homology_of
from .lcm import lcm_boundary
from .serialize import fan_from_obj, fan_to_obj, load_fan
from .toroidal import DualCell, boundary_complex, b_of, dual

__all__ = [
    "DualCell",
    "DualFanError",
    "Fan",
    "InputError",
    "ProductCell",
    "ViolationError",
    "b_of",
    "boundary_complex",
    "dual",
    "fan_from_obj",
    "fan_to_obj",
    "homology_of",
    "lcm_boundary",
    "load_fan",
    "validate_fan",
]

__version__ = "0.1.0"
