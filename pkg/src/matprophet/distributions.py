"""Finite nonnegative value distributions and their tail statistics.

The quantile threshold of a distribution at probability p is the pair (T, q)
with Pr[X > T] + q * Pr[X = T] = p exactly; q is the pass probability of a
coin flipped when the realization lands on T. The matching tail expectation
is the mean of that top-p slice of mass.
"""

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True, eq=False)
class DiscreteDistribution:
    values: np.ndarray
    probs: np.ndarray
    _cum: np.ndarray = field(repr=False, default=None)

    def __init__(self, values, probs):
        values = np.asarray(values, dtype=float)
        probs = np.asarray(probs, dtype=float)
        if values.ndim != 1 or values.shape != probs.shape or values.size == 0:
            raise ValueError("need matching 1-d value and probability arrays")
        if not np.all(np.isfinite(values)) or np.any(values < 0):
            raise ValueError("support values must be finite and nonnegative")
        if np.any(np.diff(values) <= 0):
            raise ValueError("support values must be strictly increasing")
        if not np.all(np.isfinite(probs)) or np.any(probs <= 0):
            raise ValueError("probabilities must be positive")
        if abs(probs.sum() - 1.0) > 1e-9:
            raise ValueError(f"probabilities sum to {probs.sum()}, not 1")
        values.flags.writeable = False
        probs.flags.writeable = False
        cum = np.cumsum(probs)
        cum[-1] = 1.0
        cum.flags.writeable = False
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "probs", probs)
        object.__setattr__(self, "_cum", cum)

    @classmethod
    def constant(cls, v):
        return cls([v], [1.0])

    @classmethod
    def two_point(cls, p, value):
        """0 with probability 1-p, `value` with probability p. Collapses to a
        single atom when p or value degenerates."""
        if not 0.0 <= p <= 1.0:
            raise ValueError(f"probability {p} outside [0, 1]")
        if p <= 0.0 or value == 0.0:
            return cls.constant(0.0)
        if p >= 1.0:
            return cls.constant(value)
        return cls([0.0, value], [1.0 - p, p])

    @property
    def size(self):
        return self.values.size

    def mean(self):
        return float(self.values @ self.probs)

    def max_value(self):
        return float(self.values[-1])

    def prob_above(self, x):
        """Pr[X > x]."""
        return float(self.probs[self.values > x].sum())

    def prob_at(self, x):
        hit = self.values == x
        return float(self.probs[hit].sum()) if hit.any() else 0.0

    def sample(self, rng, size=None):
        return self.sample_from_uniform(rng.random(size))

    def sample_from_uniform(self, u):
        """Map uniform [0,1) draws through the inverse cdf."""
        return self.values[np.searchsorted(self._cum, u, side="right")]

    def quantile_threshold(self, p):
        """(T, q) such that Pr[X > T] + q * Pr[X = T] == p."""
        if not 0.0 <= p <= 1.0:
            raise ValueError(f"probability {p} outside [0, 1]")
        if p == 0.0:
            return self.max_value(), 0.0
        tail = 0.0
        for j in range(self.size - 1, -1, -1):
            if tail + self.probs[j] >= p:
                # division noise can land a hair outside [0, 1]
                q = min(max((p - tail) / self.probs[j], 0.0), 1.0)
                return float(self.values[j]), float(q)
            tail += self.probs[j]
        # p == 1 up to rounding: everything passes at the bottom atom
        return float(self.values[0]), 1.0

    def tail_expectation(self, p):
        """Mean of the top-p slice of probability mass."""
        if not 0.0 < p <= 1.0:
            raise ValueError(f"tail level must lie in (0, 1], got {p}")
        t, q = self.quantile_threshold(p)
        above = self.values > t
        total = float(self.values[above] @ self.probs[above])
        total += t * q * self.prob_at(t)
        return total / p

    def pass_profile(self, threshold, atom_pass):
        """(pass probability, conditional value given a pass) under the rule
        'pass when X > threshold, or X == threshold with probability
        atom_pass'."""
        if np.isinf(threshold):
            return 0.0, 0.0
        above = self.values > threshold
        r = float(self.probs[above].sum())
        total = float(self.values[above] @ self.probs[above])
        at = self.prob_at(threshold)
        r += atom_pass * at
        total += threshold * atom_pass * at
        if r <= 0.0:
            return 0.0, 0.0
        return r, total / r
