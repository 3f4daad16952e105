"""Superspace dimensions."""

from __future__ import annotations

from dataclasses import dataclass

__all__ = ["Dims"]


@dataclass(frozen=True)
class Dims:
    """Dimensions of the superspace R^{p|2n}.

    Attributes
    ----------
    p : int
        Number of bosonic variables x_1..x_p.
    n : int
        Number of fermionic pairs; there are 2n fermionic variables.
    hermitian : bool
        Hermitian flavor: p = 2m and the complex structure J is available.
    params : bool
        Carry 2n extra Grassmann parameters (the fermionic part of an
        evaluation point).  They anticommute with the fermionic variables
        but are never differentiated or integrated.
    """

    p: int
    n: int
    hermitian: bool = False
    params: bool = False

    def __post_init__(self):
        if self.p < 1:
            raise ValueError("need at least one bosonic variable")
        if self.n < 0:
            raise ValueError("fermionic pair count must be non-negative")
        if self.hermitian and self.p % 2:
            raise ValueError("hermitian flavor needs an even bosonic dimension")

    @classmethod
    def general(cls, p: int, n: int) -> "Dims":
        return cls(p, n)

    @classmethod
    def herm(cls, m: int, n: int) -> "Dims":
        """Hermitian dimensions with 2m real bosonic variables."""
        return cls(2 * m, n, hermitian=True)

    def with_params(self, flag: bool = True) -> "Dims":
        return Dims(self.p, self.n, self.hermitian, flag)

    @property
    def m(self) -> int:
        """Complex bosonic dimension (hermitian flavor only)."""
        if not self.hermitian:
            raise ValueError("complex dimension only defined for hermitian flavor")
        return self.p // 2

    @property
    def M(self) -> int:
        """Superdimension p - 2n."""
        return self.p - 2 * self.n

    @property
    def nferm(self) -> int:
        return 2 * self.n

    @property
    def ngrass(self) -> int:
        """Total Grassmann generators including parameters."""
        return 4 * self.n if self.params else 2 * self.n

    @property
    def xmask(self) -> int:
        """Bitmask of the fermionic variables (parameters excluded)."""
        return (1 << (2 * self.n)) - 1

    def base(self) -> "Dims":
        """Same dimensions without the parameter block."""
        return Dims(self.p, self.n, self.hermitian, False)

    def compatible(self, other: "Dims") -> bool:
        return (self.p, self.n) == (other.p, other.n)

    def __str__(self):
        if self.hermitian:
            return f"(m={self.m}, n={self.n})"
        return f"(p={self.p}, n={self.n})"
