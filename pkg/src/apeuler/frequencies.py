"""Frequency sequences: smallness across scales and non-resonance probes.

In ``sqrt_prime`` mode every flattened entry ``i`` (ordered by scale,
copy, component) is ``c * eps^((S+1)(k-1)) * sqrt(p_i) / M`` with distinct
primes ``p_i`` and ``M`` the largest block norm of the ``sqrt(p_i)``. With
``eps`` rational, ``sum nu . l`` is a rational combination of square roots
of distinct primes, which vanishes only for ``l = 0``.
"""
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from math import sqrt

import numpy as np
import sympy

from apeuler.errors import ConstructionError, EnumerationBudgetError
from apeuler.scale_wrap import as_fraction


@dataclass
class FrequencySeq:
    blocks: list  # k-1 -> (J_k, d - m) array
    S: int
    epsilon: Fraction
    c: float
    eta: float = 1.0
    mode: str = "user"
    primes: tuple = field(default=())
    allow_zero: bool = False

    def __post_init__(self):
        self.epsilon = as_fraction(self.epsilon)
        self.blocks = [np.atleast_2d(np.asarray(b, dtype=np.float64)) for b in self.blocks]
        if not self.allow_zero and self.blocks and not any(np.any(b != 0) for b in self.blocks):
            raise ConstructionError("the frequency sequence must not vanish identically")
        if self.eta <= 0:
            raise ValueError(f"eta={self.eta} must be positive")

    @classmethod
    def stationary(cls, shapes, S, epsilon):
        """All-zero frequencies: the assembled field is then time independent."""
        return cls([np.zeros(s) for s in shapes], S, epsilon, c=1.0, mode="stationary",
                   allow_zero=True)

    @property
    def K(self):
        return len(self.blocks)

    def block(self, k):
        return self.blocks[k - 1]

    def block_norm(self, k):
        return float(np.linalg.norm(self.blocks[k - 1]))

    def scale(self, k):
        """``eps^((S+1)(k-1))``."""
        return float(self.epsilon ** ((self.S + 1) * (k - 1)))

    def flat(self):
        return np.concatenate([b.ravel() for b in self.blocks]) if self.blocks else np.zeros(0)

    def sup_norm(self):
        """``|nu|_inf = sup_k |nu_k|``."""
        return max(self.block_norm(k) for k in range(1, self.K + 1))

    def to_dict(self):
        return {
            "mode": self.mode,
            "S": self.S,
            "epsilon": str(self.epsilon),
            "c": self.c,
            "eta": self.eta,
            "primes": list(self.primes),
            "blocks": [b.tolist() for b in self.blocks],
            "allow_zero": self.allow_zero,
        }

    @classmethod
    def from_dict(cls, data):
        return cls(
            blocks=data["blocks"],
            S=int(data["S"]),
            epsilon=data["epsilon"],
            c=float(data["c"]),
            eta=float(data.get("eta", 1.0)),
            mode=data.get("mode", "user"),
            primes=tuple(data.get("primes", ())),
            allow_zero=bool(data.get("allow_zero", False)),
        )


def generate_frequencies(spec, d, S, c=1.0, mode="sqrt_prime", user_blocks=None, eta=1.0):
    """Build a frequency sequence for the layout ``spec`` in dimension ``d``."""
    if c <= 0:
        raise ValueError(f"amplitude c={c} must be positive")
    eps = as_fraction(spec.epsilon)
    width = d - spec.m
    if mode == "user":
        if user_blocks is None:
            raise ValueError("user mode needs explicit blocks")
        blocks = [np.asarray(b, dtype=np.float64).reshape(spec.J[k], width)
                  for k, b in enumerate(user_blocks)]
        return FrequencySeq(blocks, S, eps, c, eta, mode="user")
    if mode != "sqrt_prime":
        raise ValueError(f"unknown frequency mode {mode!r}")
    total = sum(spec.J) * width
    primes = tuple(int(p) for p in sympy.sieve.primerange(2, sympy.prime(total) + 1))
    sizes = [j * width for j in spec.J]
    norm = max(
        sqrt(sum(primes[a:a + n])) for a, n in zip(np.cumsum([0] + sizes[:-1]), sizes)
    )
    blocks = []
    start = 0
    for k, (jk, n) in enumerate(zip(spec.J, sizes), start=1):
        scale = float(eps ** ((S + 1) * (k - 1)))
        roots = np.sqrt(np.array(primes[start:start + n], dtype=np.float64))
        blocks.append((c * scale / norm * roots).reshape(jk, width))
        start += n
    return FrequencySeq(blocks, S, eps, c, eta, mode="sqrt_prime", primes=primes)


@dataclass
class SmallnessResult:
    value: float
    bound: float
    per_scale: list

    @property
    def passed(self):
        return self.value <= self.bound * (1 + 1e-12)


def check_smallness(fs):
    """Measured ``sup_k eps^(-(S+1)(k-1)) |nu_k|`` against the amplitude ``c``."""
    if not fs.blocks:
        raise ValueError("empty frequency sequence")
    per = [fs.block_norm(k) / fs.scale(k) for k in range(1, fs.K + 1)]
    return SmallnessResult(max(per), fs.c, per)


def norm_ratios(fs):
    """``|nu_{k+1}| / |nu_k|`` for consecutive stored scales."""
    return [fs.block_norm(k + 1) / fs.block_norm(k) for k in range(1, fs.K)]


@dataclass
class ProbeResult:
    minimum: float
    argmin: list
    count: int
    eta: float
    weight_max: float
    comp_max: int

    @property
    def passed(self):
        return self.minimum > 0


def _block_candidates(nu_k, k, eta, weight_max, comp_max, budget):
    n = nu_k.size
    size = (2 * comp_max + 1) ** n
    if size > budget:
        raise EnumerationBudgetError(size, budget)
    vals = np.arange(-comp_max, comp_max + 1)
    ells = np.array(list(product(vals, repeat=n)), dtype=np.int64).reshape(-1, n)
    weights = k**eta * np.sqrt(np.einsum("ij,ij->i", ells, ells).astype(np.float64))
    keep = weights <= weight_max * (1 + 1e-12)
    ells = ells[keep]
    return ells, weights[keep], ells @ nu_k.ravel()


def probe_nonresonance(fs, eta=None, weight_max=10.0, comp_max=3, budget=10**7):
    """Exhaustive minimum of ``|sum_k nu_k . l_k|`` over a bounded set of ``l``.

    The candidates are all integer ``l`` (over the stored scales) with
    ``0 < sum_k k^eta |l_k| <= weight_max`` and entries in
    ``[-comp_max, comp_max]``.

    Raises
    ------
    EnumerationBudgetError
        More than ``budget`` candidates would be generated.
    """
    eta = fs.eta if eta is None else eta
    # partial combinations: weight, dot, and row indices into each block's table
    weights = np.zeros(1)
    dots = np.zeros(1)
    index = np.zeros((1, 0), dtype=np.int64)
    tables = []
    for k in range(1, fs.K + 1):
        ells, w, dk = _block_candidates(fs.block(k), k, eta, weight_max, comp_max, budget)
        tables.append(ells)
        total_w = weights[:, None] + w[None, :]
        keep = total_w <= weight_max * (1 + 1e-12)
        count = int(keep.sum())
        if count > budget:
            raise EnumerationBudgetError(count, budget)
        ia, ib = np.nonzero(keep)
        weights = total_w[ia, ib]
        dots = dots[ia] + dk[ib]
        index = np.concatenate([index[ia], ib[:, None]], axis=1)
    nonzero = weights > 0
    weights, dots, index = weights[nonzero], dots[nonzero], index[nonzero]
    if not len(dots):
        return ProbeResult(np.inf, [], 0, eta, weight_max, comp_max)
    best = int(np.argmin(np.abs(dots)))
    argmin = [tables[k][index[best, k]].tolist() for k in range(fs.K)]
    return ProbeResult(float(abs(dots[best])), argmin, len(dots), eta, weight_max, comp_max)


def exact_combination(fs, ell):
    """Symbolic ``sum nu . l`` for a ``sqrt_prime`` sequence (up to the factor ``c / M``).

    Returns a SymPy expression; it is zero iff the combination vanishes.
    """
    if fs.mode != "sqrt_prime":
        raise ValueError("exact combinations are only available in sqrt_prime mode")
    expr = sympy.Integer(0)
    i = 0
    eps = sympy.Rational(fs.epsilon.numerator, fs.epsilon.denominator)
    for k, lk in enumerate(ell, start=1):
        scale = eps ** ((fs.S + 1) * (k - 1))
        for coeff in np.ravel(lk):
            expr += int(coeff) * scale * sympy.sqrt(fs.primes[i])
            i += 1
    return sympy.simplify(expr)
