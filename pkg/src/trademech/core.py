"""Trade instances and exact welfare computation.

Values live on discrete supports with an explicit tie rank in [0,1], so
"just above v" is representable exactly as (v, 1) instead of v + epsilon.
A price accepts a seller atom iff (value, tie) <= (level, tie) in
lexicographic order, and a buyer atom iff >=. Continuous price rules are
piecewise-polynomial densities; welfare against them integrates in closed
form.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .numkernel import Polynomial, poly_min_on_interval

_MASS_TOL = 1e-12
_PD_MASS_TOL = 1e-10


@dataclass(frozen=True)
class DiscreteDistribution:
    """Atoms are (value, tie, mass), sorted ascending by (value, tie)."""

    atoms: tuple

    def __post_init__(self):
        if not self.atoms:
            raise ValueError("distribution needs at least one atom")
        total = 0.0
        prev = None
        for v, t, m in self.atoms:
            if v < 0:
                raise ValueError(f"negative value {v}")
            if not 0.0 <= t <= 1.0:
                raise ValueError(f"tie rank {t} outside [0,1]")
            if m <= 0:
                raise ValueError(f"atom mass {m} must be positive")
            if prev is not None and (v, t) <= prev:
                raise ValueError("atoms must be strictly sorted by (value, tie)")
            prev = (v, t)
            total += m
        if abs(total - 1.0) > _MASS_TOL:
            raise ValueError(f"masses sum to {total}, not 1")

    @classmethod
    def from_atoms(cls, atoms):
        """atoms: iterable of (value, tie, mass); sorts and merges nothing."""
        return cls(tuple(sorted((float(v), float(t), float(m))
                                for v, t, m in atoms)))

    @classmethod
    def from_pairs(cls, pairs, tie=0.5):
        """pairs: iterable of (value, mass) with a common tie rank."""
        return cls.from_atoms([(v, tie, m) for v, m in pairs])

    @classmethod
    def point(cls, value, tie=0.5):
        return cls(((float(value), float(tie), 1.0),))

    @property
    def values(self):
        return np.array([v for v, _, _ in self.atoms])

    @property
    def ties(self):
        return np.array([t for _, t, _ in self.atoms])

    @property
    def masses(self):
        return np.array([m for _, _, m in self.atoms])

    def mean(self) -> float:
        return float(self.values @ self.masses)


@dataclass(frozen=True, order=True)
class Price:
    """A posted price with a tie rank deciding equal-value acceptance."""

    level: float
    tie: float = 0.5

    def __post_init__(self):
        if self.level < 0:
            raise ValueError("price level must be nonnegative")
        if not 0.0 <= self.tie <= 1.0:
            raise ValueError("price tie rank must lie in [0,1]")

    def seller_accepts(self, value, tie) -> bool:
        return (value, tie) <= (self.level, self.tie)

    def buyer_accepts(self, value, tie) -> bool:
        return (value, tie) >= (self.level, self.tie)


def just_above(level: float) -> Price:
    """The price sitting above every atom at `level` but below any larger
    value; stands in for level + epsilon."""
    return Price(level, 1.0)


def just_below(level: float) -> Price:
    return Price(level, 0.0)


@dataclass(frozen=True)
class Instance:
    seller: DiscreteDistribution
    buyer: DiscreteDistribution

    @classmethod
    def from_values(cls, seller_pairs, buyer_pairs):
        return cls(DiscreteDistribution.from_pairs(seller_pairs),
                   DiscreteDistribution.from_pairs(buyer_pairs))


def opt_welfare(inst: Instance) -> float:
    """E[max(S, B)] over the product distribution; ties are irrelevant."""
    sv = inst.seller.values[:, None]
    bv = inst.buyer.values[None, :]
    w = inst.seller.masses[:, None] * inst.buyer.masses[None, :]
    return float((w * np.maximum(sv, bv)).sum())


def _gains(inst: Instance, p: Price) -> float:
    acc_s = np.array([p.seller_accepts(v, t) for v, t, _ in inst.seller.atoms])
    acc_b = np.array([p.buyer_accepts(v, t) for v, t, _ in inst.buyer.atoms])
    if not acc_s.any() or not acc_b.any():
        return 0.0
    sv, sm = inst.seller.values[acc_s], inst.seller.masses[acc_s]
    bv, bm = inst.buyer.values[acc_b], inst.buyer.masses[acc_b]
    # acceptance of both sides forces B >= S, so every term is a true gain
    return float((sm[:, None] * bm[None, :] * (bv[None, :] - sv[:, None])).sum())


def fixed_price_welfare(inst: Instance, p: Price) -> float:
    """E[S] plus the expected gains from trades the price clears."""
    return inst.seller.mean() + _gains(inst, p)


def best_fixed_price(inst: Instance):
    """Maximize fixed_price_welfare over the atom coordinates of both sides.

    Restricting to that candidate set loses nothing: as the price moves
    between consecutive atom coordinates the accepted sets are constant.
    Ties break toward the smallest (level, tie).
    """
    cand = sorted({(v, t) for v, t, _ in inst.seller.atoms}
                  | {(v, t) for v, t, _ in inst.buyer.atoms})
    best_p, best_w = None, -np.inf
    for level, tie in cand:
        p = Price(level, tie)
        w = fixed_price_welfare(inst, p)
        if w > best_w + 1e-15:
            best_p, best_w = p, w
    return best_p, best_w


def scale_instance(inst: Instance, c: float) -> Instance:
    if c <= 0:
        raise ValueError("scale factor must be positive")
    return Instance(
        DiscreteDistribution(tuple((v * c, t, m) for v, t, m in inst.seller.atoms)),
        DiscreteDistribution(tuple((v * c, t, m) for v, t, m in inst.buyer.atoms)))


@dataclass(frozen=True)
class PriceDistribution:
    """Random price rule: point masses plus piecewise-polynomial density.

    atoms: tuple of (Price, prob); density_pieces: tuple of ((a, b), poly)
    with the density poly(x) on [a, b). Total mass must be 1 and each
    density piece nonnegative (certified through root isolation, not
    sampling).
    """

    atoms: tuple = ()
    density_pieces: tuple = ()

    def __post_init__(self):
        total = 0.0
        for p, prob in self.atoms:
            if prob < 0:
                raise ValueError("negative atom probability")
            total += prob
        for (a, b), poly in self.density_pieces:
            if not (0.0 <= a < b):
                raise ValueError(f"bad density interval [{a}, {b})")
            _, mn = poly_min_on_interval(poly, a, b)
            if mn < -1e-9:
                raise ValueError(f"density dips to {mn} on [{a}, {b})")
            total += poly.integrate(a, b)
        if abs(total - 1.0) > _PD_MASS_TOL:
            raise ValueError(f"price distribution mass {total} is not 1")

    @classmethod
    def point(cls, price: Price):
        return cls(atoms=((price, 1.0),))

    @classmethod
    def from_density(cls, pieces):
        """pieces: iterable of ((a, b), coeffs-or-Polynomial)."""
        packed = tuple(((float(a), float(b)),
                        q if isinstance(q, Polynomial) else Polynomial(tuple(q)))
                       for (a, b), q in pieces)
        return cls(density_pieces=packed)

    def mixed(self, other: "PriceDistribution", w: float) -> "PriceDistribution":
        """w * self + (1-w) * other."""
        if not 0.0 <= w <= 1.0:
            raise ValueError("mixture weight outside [0,1]")
        atoms = tuple((p, w * pr) for p, pr in self.atoms if w * pr > 0)
        atoms += tuple((p, (1 - w) * pr) for p, pr in other.atoms if (1 - w) * pr > 0)
        pieces = tuple((iv, q.scale(w)) for iv, q in self.density_pieces if w > 0)
        pieces += tuple((iv, q.scale(1 - w)) for iv, q in other.density_pieces if w < 1)
        return PriceDistribution(atoms=atoms, density_pieces=pieces)

    def scaled(self, c: float) -> "PriceDistribution":
        """Push forward through p -> c*p; masses are preserved."""
        if c <= 0:
            raise ValueError("scale factor must be positive")
        atoms = tuple((Price(p.level * c, p.tie), pr) for p, pr in self.atoms)
        pieces = []
        for (a, b), q in self.density_pieces:
            # new density r(y) = q(y/c)/c on [c*a, c*b)
            coeffs = tuple(ck / c ** (k + 1) for k, ck in enumerate(q.coeffs))
            pieces.append(((a * c, b * c), Polynomial(coeffs)))
        return PriceDistribution(atoms=atoms, density_pieces=tuple(pieces))

    def density_mass(self) -> float:
        return sum(q.integrate(a, b) for (a, b), q in self.density_pieces)


def randomized_welfare(inst: Instance, pd: PriceDistribution) -> float:
    """Expected welfare when the price is drawn from pd.

    Atom prices contribute their fixed-price gains; density pieces
    contribute the exact integral of Pr[S <= p <= B] against each value
    pair (endpoint ties are measure zero there).
    """
    total = inst.seller.mean()
    for p, prob in pd.atoms:
        total += prob * _gains(inst, p)
    if pd.density_pieces:
        anti = [((a, b), q.antiderivative()) for (a, b), q in pd.density_pieces]
        for sv, _, sm in inst.seller.atoms:
            for bv, _, bm in inst.buyer.atoms:
                if bv <= sv:
                    continue
                pr = 0.0
                for (a, b), A in anti:
                    lo = min(max(sv, a), b)
                    hi = min(max(bv, a), b)
                    if hi > lo:
                        pr += A(hi) - A(lo)
                total += sm * bm * (bv - sv) * pr
    return float(total)


def instance_to_json(inst: Instance) -> dict:
    def side(d):
        return [{"v": v, "tie": t, "p": m} for v, t, m in d.atoms]
    return {"seller": side(inst.seller), "buyer": side(inst.buyer)}


def instance_from_json(obj) -> Instance:
    if not isinstance(obj, dict) or "seller" not in obj or "buyer" not in obj:
        raise ValueError("instance JSON needs 'seller' and 'buyer' lists")

    def side(rows, name):
        if not isinstance(rows, list) or not rows:
            raise ValueError(f"'{name}' must be a nonempty list")
        atoms = []
        for row in rows:
            if not isinstance(row, dict) or "v" not in row or "p" not in row:
                raise ValueError(f"each {name} atom needs 'v' and 'p'")
            atoms.append((float(row["v"]), float(row.get("tie", 0.5)),
                          float(row["p"])))
        return DiscreteDistribution.from_atoms(atoms)

    return Instance(side(obj["seller"], "seller"), side(obj["buyer"], "buyer"))
