"""Unit systems.

All formulas carry eps0 and mu0 explicitly, so the solver runs unchanged
in SI or in normalized units (eps0 = mu0 = c = 1).  Normalized units are
the default everywhere; they make the closed-form reference values exact.
"""

import math
from dataclasses import dataclass


@dataclass(frozen=True)
class Units:
    """Vacuum permittivity/permeability pair defining the unit system."""

    eps0: float
    mu0: float
    name: str = "custom"

    @property
    def c(self) -> float:
        """Vacuum speed of light."""
        return 1.0 / math.sqrt(self.eps0 * self.mu0)

    @property
    def impedance(self) -> float:
        """Vacuum wave impedance sqrt(mu0/eps0)."""
        return math.sqrt(self.mu0 / self.eps0)


NORMALIZED = Units(eps0=1.0, mu0=1.0, name="normalized")
SI = Units(eps0=8.8541878128e-12, mu0=1.25663706212e-6, name="si")


def units_by_name(name: str) -> Units:
    table = {"normalized": NORMALIZED, "si": SI}
    try:
        return table[name.lower()]
    except KeyError:
        raise ValueError(f"unknown unit system {name!r}; expected one of {sorted(table)}")
