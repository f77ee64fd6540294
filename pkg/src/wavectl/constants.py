"""Physical constants used across the toolkit.

All quantities are SI.  The speed of light is exact by definition;
using the exact value (rather than 3e8) keeps derived frequencies
reproducible to the last digit.
"""

import math

# speed of light in vacuum, m/s (exact)
C0 = 299_792_458.0

# free-space wave impedance, ohms (design value used by the cell model)
ETA0 = 377.0

# vacuum permeability, H/m
MU0 = 4.0e-7 * math.pi
