"""Dual potential pairs for integer height models and circle spin models.

A height potential is a symmetric table ``c_n >= 0`` (``n`` the integer
increment across an edge, ``c_n`` the Boltzmann weight of that increment,
zero beyond the stored range).  Its dual circle weight is the cosine series

    w(a) = c_0 + sum_{n>=1} 2 c_n cos(n a),

which must stay strictly positive; the spin potential is ``-log w``.  Both
directions of the bridge are provided: synthesis of ``w`` from a table and
extraction of a table from any smooth even weight by periodic quadrature.

Built-in families:

* ``xy(beta)``      -- c_n are the modified Bessel functions I_n(beta),
                       dual to the weight exp(beta cos a);
* ``ivgff(beta)``   -- c_n = exp(-beta n^2) (integer Gaussian), dual to a
                       theta-like weight (Villain model);
* ``lipschitz(beta)`` -- increments restricted to {-1, 0, 1} with weight
                       exp(-beta) on +-1; needs exp(-beta) < 1/2;
* ``annealed(...)`` -- mixtures of integer Gaussians.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

__all__ = [
    "HeightPotential",
    "SpinPotential",
    "PotentialPair",
    "PositiveDefinitenessError",
    "make_xy",
    "make_ivgff",
    "make_lipschitz",
    "make_annealed",
    "pair_from_spin",
    "pair_from_scaled_spin",
    "pair_from_table",
    "spin_from_height",
    "height_from_spin",
    "fourier_coefficients",
    "check_positive_definite",
    "check_infinitely_divisible",
    "convexity_check",
    "split_potential",
    "merge_parallel",
    "parse_potential_spec",
    "load_table_text",
]

# Dropped-tail criterion for table truncation: sum (1+n^2) c_n over the cut
# tail must stay below TAIL_TOL * c_0.
TAIL_TOL = 1e-14


class PositiveDefinitenessError(ValueError):
    """Raised when a candidate weight fails strict positivity / nonnegative
    Fourier coefficients."""


@dataclass(frozen=True)
class HeightPotential:
    """Symmetric nonnegative weight table; ``table[n]`` is the weight of
    increments +-n, and increments beyond the table have weight zero."""

    table: tuple[float, ...]

    def __post_init__(self):
        t = np.asarray(self.table, dtype=np.float64)
        if t.ndim != 1 or len(t) == 0:
            raise ValueError("table must be a nonempty vector c_0..c_N")
        if t[0] <= 0:
            raise ValueError("c_0 must be positive")
        if np.any(t < 0):
            raise ValueError("height weights must be nonnegative")

    @property
    def n_max(self) -> int:
        return len(self.table) - 1

    def weights(self) -> np.ndarray:
        return np.asarray(self.table, dtype=np.float64)

    def weight(self, n) -> np.ndarray:
        """Vectorized c_{|n|}, zero outside the stored range."""
        n = np.abs(np.asarray(n, dtype=np.int64))
        t = self.weights()
        out = np.zeros(n.shape, dtype=np.float64)
        ok = n <= self.n_max
        out[ok] = t[n[ok]]
        return out

    def energy(self, n) -> np.ndarray:
        """-log weight; +inf on forbidden increments."""
        w = self.weight(n)
        with np.errstate(divide="ignore"):
            return -np.log(w)

    def total_mass(self) -> float:
        """Sum of the table over all integers (counting +-n once each)."""
        t = self.weights()
        return float(t[0] + 2.0 * t[1:].sum())

    def second_moment(self) -> float:
        t = self.weights()
        n = np.arange(len(t))
        return float(2.0 * np.sum(n * n * t))


@dataclass(frozen=True)
class SpinPotential:
    """Circle weight w > 0 with evaluators for -log w and its derivatives,
    all computed by direct trigonometric sums from the backing table."""

    table: tuple[float, ...]

    def _series(self, alpha, moment: int, kind: str) -> np.ndarray:
        alpha = np.asarray(alpha, dtype=np.float64)
        t = np.asarray(self.table, dtype=np.float64)
        n = np.arange(1, len(t))
        phase = np.multiply.outer(alpha, n)
        osc = np.cos(phase) if kind == "cos" else np.sin(phase)
        acc = 2.0 * (osc @ (n ** moment * t[1:]))
        if kind == "cos" and moment == 0:
            acc = acc + t[0]
        return acc

    def weight(self, alpha) -> np.ndarray:
        """w(a) = c_0 + sum 2 c_n cos(n a)."""
        return self._series(alpha, 0, "cos")

    def potential(self, alpha) -> np.ndarray:
        return -np.log(self.weight(alpha))

    def dpotential(self, alpha) -> np.ndarray:
        """First derivative of -log w; odd, vanishes at 0."""
        dw = -self._series(alpha, 1, "sin")
        return -dw / self.weight(alpha)

    def d2potential(self, alpha) -> np.ndarray:
        """Second derivative of -log w: (w'^2 - w'' w) / w^2."""
        w = self.weight(alpha)
        dw = -self._series(alpha, 1, "sin")
        d2w = -self._series(alpha, 2, "cos")
        return (dw * dw - d2w * w) / (w * w)

    def curvature_at_zero(self) -> float:
        """Equals sum n^2 c_n / sum c_n, the single-edge increment variance."""
        return float(self.d2potential(0.0))

    def min_weight(self, grid: int = 1024) -> tuple[float, float]:
        """Minimum of w over a uniform grid, with its location."""
        alpha = np.linspace(-np.pi, np.pi, grid, endpoint=False)
        w = self.weight(alpha)
        k = int(np.argmin(w))
        return float(w[k]), float(alpha[k])


@dataclass(frozen=True)
class PotentialPair:
    """A height table bridged to its circle dual, with provenance for
    temperature rescaling."""

    height: HeightPotential
    spin: SpinPotential
    family: str
    params: dict = field(default_factory=dict)

    @property
    def beta(self) -> float | None:
        return self.params.get("beta")

    def label(self) -> str:
        if self.beta is not None:
            return f"{self.family}:{self.beta:g}"
        return self.family

    def scaled(self, beta: float) -> "PotentialPair":
        """Same family at a different inverse temperature."""
        if self.family == "xy":
            return make_xy(beta)
        if self.family == "ivgff":
            return make_ivgff(beta)
        if self.family == "lipschitz":
            return make_lipschitz(beta)
        if self.family == "scaled_spin":
            return pair_from_scaled_spin(self.params["base"], beta,
                                         name=self.params.get("name", "scaled_spin"))
        raise ValueError(f"family {self.family!r} has no temperature scale")


def _trim_table(c: np.ndarray) -> np.ndarray:
    """Drop the trailing tail whose weighted mass is below TAIL_TOL * c_0."""
    c = np.asarray(c, dtype=np.float64)
    # cut where the coefficients sink into quadrature rounding noise
    above = np.nonzero(c >= 3e-15 * c[0])[0]
    c = c[:above[-1] + 1] if len(above) else c[:1]
    n = np.arange(len(c))
    mass = (1.0 + n * n) * c
    cum_tail = np.cumsum(mass[::-1])[::-1]
    keep = len(c)
    # retain c_0..c_k where the dropped tail c_{k+1}.. is small enough
    for k in range(len(c) - 1, 0, -1):
        if cum_tail[k] < TAIL_TOL * c[0]:
            keep = k
    return c[:max(keep, 1)]


def fourier_coefficients(weight: Callable, n_coeffs: int, points: int) -> np.ndarray:
    """Cosine coefficients a_n = (1/2pi) int w(a) cos(n a) da of an even weight,
    by midpoint quadrature on a uniform periodic grid.

    The companion sine sums are evaluated as a consistency check and must
    vanish to rounding for an even integrand.
    """
    theta = (np.arange(points) + 0.5) * (2.0 * np.pi / points) - np.pi
    vals = np.asarray(weight(theta), dtype=np.float64)
    n = np.arange(n_coeffs + 1)
    phase = np.outer(n, theta)
    cos_part = (np.cos(phase) @ vals) / points
    sin_part = (np.sin(phase) @ vals) / points
    scale = max(abs(cos_part[0]), 1e-300)
    if np.max(np.abs(sin_part)) > 1e-10 * scale:
        raise ValueError("weight is not even: sine components do not cancel")
    return cos_part


def height_from_spin(potential: Callable | None = None, n_max: int | None = None,
                     points: int = 256, *, weight: Callable | None = None,
                     strict: bool = True) -> HeightPotential:
    """Extract the height table dual to a spin potential (or weight).

    ``potential`` is the even function U with weight exp(-U); alternatively
    pass ``weight`` directly.  Quadrature starts at ``points`` nodes and the
    grid is doubled until two successive extractions agree to 1e-12
    relative, which is reached quickly for analytic weights.
    """
    if weight is None:
        if potential is None:
            raise ValueError("either a potential or a weight is required")
        weight = lambda a: np.exp(-np.asarray(potential(a)))
    cap = n_max if n_max is not None else 256
    m = max(points, 4 * (cap + 1))
    prev = None
    for _ in range(8):
        coef = fourier_coefficients(weight, cap, m)
        if prev is not None and np.max(np.abs(coef - prev)) <= 1e-12 * max(coef[0], 1e-300):
            break
        prev, m = coef, 2 * m
    neg = coef < 0
    if np.any(coef < -1e-12 * coef[0]):
        worst = int(np.argmin(coef))
        msg = (f"weight is not positive definite as a height dual: "
               f"coefficient {worst} = {coef[worst]:.3e}")
        if strict:
            raise PositiveDefinitenessError(msg)
    coef = np.where(neg, 0.0, coef)
    table = coef if n_max is not None else _trim_table(coef)
    return HeightPotential(tuple(table))


def spin_from_height(hp: HeightPotential, grid: int = 1024) -> SpinPotential:
    """Synthesize the circle dual of a height table, checking positivity of
    the weight on a dense grid."""
    sp = SpinPotential(tuple(hp.weights()))
    wmin, where = sp.min_weight(grid)
    if wmin <= 0:
        raise PositiveDefinitenessError(
            f"height table is not positive definite: w({where:.6f}) = {wmin:.6e}")
    return sp


def _make_pair(table: np.ndarray, family: str, params: dict) -> PotentialPair:
    hp = HeightPotential(tuple(table))
    return PotentialPair(hp, spin_from_height(hp), family, params)


def make_xy(beta: float) -> PotentialPair:
    """Rotor pair: height weights I_n(beta) extracted from exp(beta cos)."""
    if beta < 0:
        raise ValueError("beta must be nonnegative")
    if beta == 0.0:
        return _make_pair(np.array([1.0]), "xy", {"beta": 0.0})
    hp = height_from_spin(lambda a: -beta * np.cos(a))
    return PotentialPair(hp, spin_from_height(hp), "xy", {"beta": float(beta)})


def make_ivgff(beta: float) -> PotentialPair:
    """Integer Gaussian pair: c_n = exp(-beta n^2)."""
    if beta <= 0:
        raise ValueError("beta must be positive")
    n = np.arange(0, int(math.ceil(math.sqrt(40.0 / beta))) + 2)
    return _make_pair(_trim_table(np.exp(-beta * n * n)), "ivgff", {"beta": float(beta)})


def make_lipschitz(beta: float) -> PotentialPair:
    """Increments restricted to {-1, 0, 1}; the dual weight at a = pi is
    1 - 2 exp(-beta), so exp(-beta) < 1/2 is required."""
    if math.exp(-beta) >= 0.5:
        raise PositiveDefinitenessError(
            f"lipschitz pair needs exp(-beta) < 1/2; got beta = {beta}")
    return _make_pair(np.array([1.0, math.exp(-beta)]), "lipschitz", {"beta": float(beta)})


def make_annealed(components) -> PotentialPair:
    """Mixture of integer Gaussians: c_n = sum_i w_i exp(-g_i n^2 / 2) with
    nonnegative mixture weights, not all zero."""
    comps = tuple((float(g), float(w)) for (g, w) in components)
    if not comps or any(w < 0 for (_, w) in comps) or all(w == 0 for (_, w) in comps):
        raise ValueError("annealed mixture needs nonnegative weights, not all zero")
    if any(g <= 0 for (g, _) in comps):
        raise ValueError("annealed mixture needs positive curvature parameters")
    gmin = min(g for (g, w) in comps if w > 0)
    n = np.arange(0, int(math.ceil(math.sqrt(80.0 / gmin))) + 2)
    c = np.zeros(len(n))
    for (g, w) in comps:
        c += w * np.exp(-0.5 * g * n * n)
    return _make_pair(_trim_table(c), "annealed", {"components": comps})


def pair_from_table(table, name: str = "custom", params: dict | None = None) -> PotentialPair:
    return _make_pair(np.asarray(table, dtype=np.float64), name, params or {})


def pair_from_spin(potential: Callable, name: str = "custom_spin") -> PotentialPair:
    hp = height_from_spin(potential)
    return PotentialPair(hp, spin_from_height(hp), name, {})


def pair_from_scaled_spin(base_potential: Callable, beta: float,
                          name: str = "scaled_spin") -> PotentialPair:
    """Pair dual to beta * U0 for a fixed base potential U0.

    This is the temperature family used by the rescaling identities: the
    table at beta is the k-fold convolution of the table at beta / k.
    """
    hp = height_from_spin(lambda a: beta * np.asarray(base_potential(a)))
    return PotentialPair(hp, spin_from_height(hp), "scaled_spin",
                         {"beta": float(beta), "base": base_potential, "name": name})


def check_positive_definite(fn: Callable, n_coeffs: int = 64, points: int = 1024) -> float:
    """Margin of positive definiteness of an even function: the smallest of
    its leading Fourier cosine coefficients (negative means a violation)."""
    coef = fourier_coefficients(lambda a: np.asarray(fn(a), dtype=np.float64),
                                n_coeffs, points)
    return float(coef.min())


def check_infinitely_divisible(pair: PotentialPair, powers=(2, 3, 4),
                               n_coeffs: int = 64) -> list[tuple[int, float]]:
    """For each divisor m, the smallest Fourier coefficient of w^(1/m).

    All margins nonnegative (to rounding) is the numerical signature of
    infinite divisibility of the height weights; a clearly negative margin
    exhibits a failing division.
    """
    report = []
    for m in powers:
        coef = fourier_coefficients(lambda a: self_root(pair, a, m), n_coeffs, 4096)
        report.append((int(m), float(coef.min())))
    return report


def self_root(pair: PotentialPair, alpha, m: int) -> np.ndarray:
    return np.power(pair.spin.weight(alpha), 1.0 / m)


def convexity_check(hp: HeightPotential) -> float:
    """Smallest log-concavity slack c_k^2 - c_{k-1} c_{k+1} over the table
    (symmetric extension at k = 0); nonnegative iff the height energy is
    convex on its support."""
    c = np.concatenate([hp.weights(), [0.0]])
    ext = np.concatenate([[c[1]], c])  # c_{-1} = c_1
    slack = c[:-1] ** 2 - ext[:-2] * c[1:]
    return float(slack.min())


def split_potential(pair: PotentialPair, k: int) -> PotentialPair:
    """Potential whose k-fold convolution reproduces ``pair``.

    For temperature families this is the same family at beta / k.  For
    families without a multiplicative structure the k-th root of the circle
    weight is extracted by quadrature and must itself be positive definite;
    a failure is reported rather than silently accepted.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    if k == 1:
        return pair
    if pair.family in ("xy", "scaled_spin"):
        return pair.scaled(pair.beta / k)
    if pair.beta is None and pair.family not in ("annealed",):
        raise ValueError(f"potential {pair.label()!r} carries no temperature scale to split")
    hp = height_from_spin(weight=lambda a: self_root(pair, a, k))
    return PotentialPair(hp, spin_from_height(hp), f"{pair.family}^(1/{k})",
                         dict(pair.params))


def convolve_tables(hp: HeightPotential, times: int) -> np.ndarray:
    """k-fold convolution of a symmetric table, returned as c_0..c_N."""
    full = np.concatenate([hp.weights()[::-1], hp.weights()[1:]])
    acc = full.copy()
    for _ in range(times - 1):
        acc = np.convolve(acc, full)
    mid = len(acc) // 2
    return acc[mid:]


def merge_parallel(p1: PotentialPair, p2: PotentialPair) -> PotentialPair:
    """Effective potential of two parallel edges: height energies add, so
    the weight tables multiply entrywise.

    The result is renormalized (a global energy shift) only when c_0 leaves
    a safely representable range; the model is invariant under such shifts.
    """
    n = min(p1.height.n_max, p2.height.n_max)
    c = p1.height.weights()[:n + 1] * p2.height.weights()[:n + 1]
    if not (1e-8 <= c[0] <= 1e8):
        c = c / c[0]
    return _make_pair(_trim_table(c), f"merge({p1.family},{p2.family})", {})


_BRACED = re.compile(r"^\{(.*)\}$")


def parse_potential_spec(spec: str) -> PotentialPair:
    """Parse a potential description.

    Accepted forms: the shorthand ``family:beta`` (e.g. ``xy:1.0``), the
    key-value form ``{ family = "xy", beta = 1.0 }``, and
    ``annealed:g1xw1,g2xw2``.
    """
    spec = spec.strip()
    m = _BRACED.match(spec)
    if m:
        fields = {}
        for part in m.group(1).split(","):
            if not part.strip():
                continue
            key, _, val = part.partition("=")
            fields[key.strip()] = val.strip().strip('"').strip("'")
        family = fields.pop("family")
        if family == "annealed":
            comps = [tuple(float(x) for x in c.split("x"))
                     for c in fields["components"].split(";")]
            return make_annealed(comps)
        return _FAMILIES[family](float(fields["beta"]))
    family, _, arg = spec.partition(":")
    if family == "annealed":
        comps = [tuple(float(x) for x in c.split("x")) for c in arg.split(",")]
        return make_annealed(comps)
    if family not in _FAMILIES:
        raise ValueError(f"unknown potential family {family!r}")
    return _FAMILIES[family](float(arg) if arg else 1.0)


_FAMILIES = {"xy": make_xy, "ivgff": make_ivgff, "lipschitz": make_lipschitz}


def load_table_text(text: str, name: str = "custom") -> PotentialPair:
    """Load a custom table from two-column text (n, c_n); missing rows are zero."""
    entries = {}
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        n_str, c_str = line.split()[:2]
        entries[abs(int(n_str))] = float(c_str)
    table = np.zeros(max(entries) + 1 if entries else 1)
    for n, c in entries.items():
        table[n] = c
    return pair_from_table(table, name=name)
