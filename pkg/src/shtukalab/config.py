"""The arithmetic universe of a computation."""

from __future__ import annotations

from dataclasses import dataclass, field

from .field import Field, canonical_poly, get_field, is_prime


@dataclass(frozen=True)
class BaseConfig:
    """Residue field, Frobenius exponent and characteristic point.

    ``q = p**e`` is the size of the constant field F_q; the residue field is
    F_{q^ell_degree}.  ``zeta`` is the image of z in o_L, stored exactly as a
    finite mapping ``pi-exponent -> field code``; the empty mapping means
    zeta = 0 (finite characteristic).
    """

    p: int
    e: int = 1
    ell_degree: int = 1
    zeta: tuple[tuple[int, int], ...] = ()
    default_pi_prec: int = 32
    default_z_prec: int = 12
    field_poly: tuple[int, ...] | None = None
    _field: Field = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not is_prime(self.p):
            raise ValueError(f"p={self.p} is not prime")
        if self.e < 1 or self.ell_degree < 1:
            raise ValueError("e and ell_degree must be positive")
        k = self.e * self.ell_degree
        poly = tuple(self.field_poly) if self.field_poly else canonical_poly(self.p, k)
        if len(poly) - 1 != k:
            raise ValueError(f"field_poly must have degree {k}")
        object.__setattr__(self, "field_poly", poly)
        object.__setattr__(self, "_field", get_field(self.p, poly))
        zeta = tuple(sorted((int(i), int(c)) for i, c in dict(self.zeta).items() if c))
        if any(i < 1 for i, _ in zeta):
            raise ValueError("zeta must have positive valuation (or be 0)")
        object.__setattr__(self, "zeta", zeta)
        if self.default_pi_prec < 1 or self.default_z_prec < 1:
            raise ValueError("default precisions must be positive")

    @property
    def q(self) -> int:
        return self.p**self.e

    @property
    def field(self) -> Field:
        return self._field

    @property
    def zeta_valuation(self) -> int | None:
        return self.zeta[0][0] if self.zeta else None

    def with_zeta(self, zeta) -> "BaseConfig":
        return BaseConfig(self.p, self.e, self.ell_degree, tuple(dict(zeta).items()),
                          self.default_pi_prec, self.default_z_prec, self.field_poly)

    def with_precision(self, pi_prec=None, z_prec=None) -> "BaseConfig":
        return BaseConfig(self.p, self.e, self.ell_degree, self.zeta,
                          pi_prec or self.default_pi_prec, z_prec or self.default_z_prec,
                          self.field_poly)


def config_for_q(q: int, ell_degree: int = 1, zeta=(), **kw) -> BaseConfig:
    """Build a config from q = p^e directly."""
    for p in range(2, q + 1):
        if is_prime(p) and q % p == 0:
            e = 0
            m = q
            while m % p == 0:
                m //= p
                e += 1
            if m != 1:
                break
            return BaseConfig(p, e, ell_degree, tuple(dict(zeta).items()), **kw)
    raise ValueError(f"q={q} is not a prime power")
