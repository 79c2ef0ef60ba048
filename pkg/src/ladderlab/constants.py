"""Numerical constants used throughout the package."""

import math
from dataclasses import dataclass, field

#: Euler-Mascheroni constant, to double precision.
EULER_MASCHERONI = 0.5772156649015328606


@dataclass(frozen=True)
class MathConstants:
    """The constant bundle every increment law and threshold depends on.

    ``c`` is the Euler-Mascheroni constant, ``a = e^4.5`` is the scale
    factor of the inverse Ingham threshold, and ``ln_two_pi`` enters the
    ladder's defining equation.
    """

    c: float = EULER_MASCHERONI
    one_minus_c: float = 1.0 - EULER_MASCHERONI
    a: float = field(default_factory=lambda: math.exp(4.5))
    ln_two_pi: float = field(default_factory=lambda: math.log(2.0 * math.pi))


CONSTANTS = MathConstants()

TWO_PI = 2.0 * math.pi
