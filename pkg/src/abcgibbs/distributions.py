"""Elementary prior distributions."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .rng import RngStream


class InvalidParameter(ValueError):
    pass


def _positive(name, value):
    if not np.all(np.asarray(value) > 0):
        raise InvalidParameter(f"{name} must be > 0, got {value!r}")


@dataclass(frozen=True)
class Normal:
    mean: float
    sd: float

    def __post_init__(self):
        _positive("sd", self.sd)

    def sample(self, rng: RngStream, size=None):
        return rng.normal(self.mean, self.sd, size)


@dataclass(frozen=True)
class Uniform:
    lo: float
    hi: float

    def __post_init__(self):
        if not self.lo < self.hi:
            raise InvalidParameter(f"need lo < hi, got ({self.lo}, {self.hi})")

    def sample(self, rng: RngStream, size=None):
        return rng.uniform(self.lo, self.hi, size)


@dataclass(frozen=True)
class InverseGamma:
    """Inverse gamma with density proportional to x^(-shape-1) exp(-scale/x)."""

    shape: float
    scale: float

    def __post_init__(self):
        _positive("shape", self.shape)
        _positive("scale", self.scale)

    def sample(self, rng: RngStream, size=None):
        return self.scale / rng.gamma(self.shape, 1.0, size)


@dataclass(frozen=True)
class Dirichlet:
    concentration: tuple = field()

    def __post_init__(self):
        c = np.asarray(self.concentration, dtype=float)
        if c.ndim != 1 or c.size < 2:
            raise InvalidParameter("concentration must be a vector of length >= 2")
        _positive("concentration", c)
        object.__setattr__(self, "concentration", tuple(float(v) for v in c))

    def sample(self, rng: RngStream, size=None):
        return dirichlet(np.asarray(self.concentration), rng, size)


@dataclass(frozen=True)
class Exponential:
    rate: float

    def __post_init__(self):
        _positive("rate", self.rate)

    def sample(self, rng: RngStream, size=None):
        return rng.exponential(1.0 / self.rate, size)


@dataclass(frozen=True)
class HalfCauchy:
    scale: float = 1.0

    def __post_init__(self):
        _positive("scale", self.scale)

    def sample(self, rng: RngStream, size=None):
        u = rng.uniform(0.0, 1.0, size)
        return np.abs(self.scale * np.tan(np.pi * (u - 0.5)))


Distribution = Normal | Uniform | InverseGamma | Dirichlet | Exponential | HalfCauchy


def sample(dist: Distribution, rng: RngStream, size=None):
    """Draw from ``dist``; Dirichlet draws lie on the simplex."""
    return dist.sample(rng, size)


def dirichlet(concentration, rng: RngStream, size=None):
    """Dirichlet draws via normalized gammas.

    ``concentration`` may carry leading batch dimensions, in which case one
    vector is drawn per batch entry (``size`` is then ignored).
    """
    conc = np.asarray(concentration, dtype=float)
    if conc.ndim == 1 and size is not None:
        shape = (size, conc.size) if np.isscalar(size) else (*size, conc.size)
        g = rng.gamma(np.broadcast_to(conc, shape))
    else:
        g = rng.gamma(conc)
    total = g.sum(axis=-1, keepdims=True)
    with np.errstate(invalid="ignore", divide="ignore"):
        out = g / total
    # all-zero gamma draws happen for tiny concentrations; put the mass on the largest
    bad = ~np.isfinite(out).all(axis=-1)
    if np.any(bad):
        fix = np.zeros_like(out)
        idx = np.argmax(np.broadcast_to(conc, out.shape), axis=-1)
        np.put_along_axis(fix, idx[..., None], 1.0, axis=-1)
        out = np.where(bad[..., None], fix, out)
    return out
