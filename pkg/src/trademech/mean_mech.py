"""Price lotteries that know a single mean.

Knowing E[S], draw u uniform on [0, 3] and post u * E[S]. Knowing E[B],
draw u on [0, 2] from the fixed three-piece distribution whose cdf runs
u/(3-3u) up to 1/2, (4u-1)/3 up to 2/3, then (u+1)/3. Either lottery
collects at least two thirds of the first-best welfare on every
instance with the declared mean, and `two_thirds_hardness` produces the
matched-mean instance pair showing no lottery can promise more.

Verification of the guarantee runs over the reduced worst-case family:
a two-point distribution on the known side against a single point on
the other, with the known side scaled to mean one. The two-point side
places x with probability p and (1 - x*p)/(1 - p) with the rest, so
scanning (x, p, y) boxes covers every instance that matters.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .core import (Instance, Price, PriceDistribution, fixed_price_welfare,
                   opt_welfare, randomized_welfare)
from .numkernel.lp import lp_problem, lp_solve
from .numkernel.poly import fit_polynomial_pieces

SELLER_MEAN = "seller_mean"
BUYER_MEAN = "buyer_mean"

_TARGET = 2.0 / 3.0


def _check_side(side):
    if side not in (SELLER_MEAN, BUYER_MEAN):
        raise ValueError(f"side must be {SELLER_MEAN!r} or {BUYER_MEAN!r}")


@dataclass(frozen=True)
class MeanMechanism:
    """A mean-keyed price lottery for one side of the market."""

    side: str
    mean: float

    def __post_init__(self):
        _check_side(self.side)
        if self.mean <= 0:
            raise ValueError("mean must be positive")


def _buyer_unit_cdf(v):
    v = np.asarray(v, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.select(
            [v <= 0.0, v <= 0.5, v <= 2.0 / 3.0, v < 2.0],
            [0.0, v / (3.0 - 3.0 * v), (4.0 * v - 1.0) / 3.0, (v + 1.0) / 3.0],
            default=1.0)
    return out


def mean_mech_price_cdf(m: MeanMechanism, x: float) -> float:
    """Pr[price <= x * mean], with x the price in units of the mean."""
    if m.side == SELLER_MEAN:
        return float(min(max(x, 0.0) / 3.0, 1.0))
    return float(_buyer_unit_cdf(x))


@lru_cache(maxsize=None)
def _unit_lottery(side) -> PriceDistribution:
    """The price distribution in mean-one units.

    The seller lottery is a flat density. The first buyer piece has
    density 1/(3(1-u)^2), which is not polynomial, so it is fitted to
    high accuracy; the other two pieces are exact constants.
    """
    if side == SELLER_MEAN:
        return PriceDistribution.from_density([((0.0, 3.0), (1.0 / 3.0,))])
    pieces = list(fit_polynomial_pieces(
        lambda u: 1.0 / (3.0 * (1.0 - u) ** 2), 0.0, 0.5, tol=1e-12))
    pieces.append(((0.5, 2.0 / 3.0), (4.0 / 3.0,)))
    pieces.append(((2.0 / 3.0, 2.0), (1.0 / 3.0,)))
    return PriceDistribution.from_density(pieces)


def mean_mech_welfare(m: MeanMechanism, inst: Instance) -> float:
    """Exact expected welfare of the lottery on inst.

    The lottery prices relative to the declared mean, so that mean has
    to agree with the matching side of the instance; a relative gap
    beyond 1e-9 is rejected rather than silently rescaled.
    """
    side_dist = inst.seller if m.side == SELLER_MEAN else inst.buyer
    actual = side_dist.mean()
    if abs(actual / m.mean - 1.0) > 1e-9:
        raise ValueError(f"declared mean {m.mean} does not match the "
                         f"instance mean {actual}")
    return randomized_welfare(inst, _unit_lottery(m.side).scaled(m.mean))


def family_objective(side, x, p, y):
    """E[welfare] - (2/3) E[max] on the worst-case family, mean-one units.

    Arrays broadcast; p must stay strictly below 1 so the second point
    of the two-point side exists. The known side mixes x against
    z = (1 - x*p)/(1 - p); the other side sits at y.
    """
    x = np.asarray(x, dtype=float)
    p = np.asarray(p, dtype=float)
    y = np.asarray(y, dtype=float)
    z = (1.0 - x * p) / (1.0 - p)
    if side == SELLER_MEAN:
        # price lands in [v, y] with probability (min(y,3)-min(v,3))/3
        alg = 1.0 + (p * np.maximum(y - x, 0.0)
                     * (np.minimum(y, 3.0) - np.minimum(x, 3.0))
                     + (1.0 - p) * np.maximum(y - z, 0.0)
                     * (np.minimum(y, 3.0) - np.minimum(z, 3.0))) / 3.0
    else:
        fy = _buyer_unit_cdf(y)
        alg = y + (p * np.maximum(x - y, 0.0) * (_buyer_unit_cdf(x) - fy)
                   + (1.0 - p) * np.maximum(z - y, 0.0)
                   * (_buyer_unit_cdf(z) - fy))
    opt = p * np.maximum(x, y) + (1.0 - p) * np.maximum(z, y)
    return alg - _TARGET * opt


def _local_minimum(side, pts, step, best, best_arg):
    # rescan a half-step neighborhood of each flagged point at a
    # twenty times finer resolution
    offsets = np.linspace(-0.5, 0.5, 21) * step
    for lo in range(0, len(pts), 200):
        chunk = pts[lo:lo + 200]
        xs = np.clip(chunk[:, 0, None] + offsets, 0.0, 1.0)
        ps = np.clip(chunk[:, 1, None] + offsets, 0.0, 1.0 - 1e-9)
        ys = np.maximum(chunk[:, 2, None] + offsets, 0.0)
        obj = family_objective(side, xs[:, :, None, None],
                               ps[:, None, :, None], ys[:, None, None, :])
        k = int(np.argmin(obj))
        w, i, j, l = np.unravel_index(k, obj.shape)
        if obj[w, i, j, l] < best:
            best = float(obj[w, i, j, l])
            best_arg = (float(xs[w, i]), float(ps[w, j]), float(ys[w, l]))
    return best, best_arg


def verify_two_thirds(side, x_grid=None, p_grid=None, y_grid=None, *,
                      step=0.005, refine_band=1e-4):
    """Scan the worst-case family for the two-thirds guarantee.

    Returns (minimum objective, (x, p, y) attaining it). Default grids
    use the given step, with p stopping short of 1 and y running one
    unit past the lottery's support so the linear tail is represented.
    Any grid point whose objective is within refine_band of zero gets a
    finer local rescan, guarding against minima that fall between grid
    points. A minimum at or above -1e-9 certifies the guarantee on the
    scanned family.
    """
    _check_side(side)
    if x_grid is None:
        x_grid = np.arange(0.0, 1.0 + 0.5 * step, step)
    x_grid = np.clip(np.asarray(x_grid, dtype=float), 0.0, 1.0)
    if p_grid is None:
        p_grid = np.arange(0.0, 1.0, step)
    p_grid = np.asarray(p_grid, dtype=float)
    cap = 3.0 if side == SELLER_MEAN else 2.0
    if y_grid is None:
        y_grid = np.append(np.arange(0.0, cap + 0.5 * step, step), cap + 1.0)
    y_grid = np.asarray(y_grid, dtype=float)

    best = np.inf
    best_arg = None
    flagged = []
    chunk = max(1, int(2e6 // (len(p_grid) * len(y_grid))))
    for lo in range(0, len(x_grid), chunk):
        xs = x_grid[lo:lo + chunk]
        obj = family_objective(side, xs[:, None, None], p_grid[None, :, None],
                               y_grid[None, None, :])
        k = int(np.argmin(obj))
        i, j, l = np.unravel_index(k, obj.shape)
        if obj[i, j, l] < best:
            best = float(obj[i, j, l])
            best_arg = (float(xs[i]), float(p_grid[j]), float(y_grid[l]))
        for i, j, l in np.argwhere(obj <= refine_band):
            flagged.append((xs[i], p_grid[j], y_grid[l]))
    if flagged:
        best, best_arg = _local_minimum(side, np.array(flagged), step,
                                        best, best_arg)
    return best, best_arg


def two_thirds_hardness(side, eps):
    """A matched-mean instance pair capping every lottery at two thirds.

    One instance wants the price high (or the trade certain), the other
    pays off only on the complementary price region, and the two
    regions are disjoint. Splitting lottery mass between them is a tiny
    linear program; its value is the best worst-case ratio any price
    lottery reaches on the pair, and it tends to 2/3 as eps shrinks.
    Returns ((instance_a, instance_b), lp_value).
    """
    _check_side(side)
    if not 0.0 < eps < 0.1:
        raise ValueError("eps must lie in (0, 0.1)")
    big = 1.0 / eps
    if side == SELLER_MEAN:
        inst_a = Instance.from_values([(1.0, 1.0)], [(big, 1.0)])
        inst_b = Instance.from_values([(0.0, 1.0 - eps), (big, eps)],
                                      [(1.0 - eps, 1.0)])
        regions = (Price(0.5 * (1.0 + big)), Price(0.5 * (1.0 - eps)))
    else:
        inst_a = Instance.from_values([(0.0, 1.0)], [(1.0, 1.0)])
        inst_b = Instance.from_values([(1.0 + eps, 1.0)],
                                      [(0.0, 1.0 - eps), (big, eps)])
        regions = (Price(0.5), Price(0.5 * (1.0 + eps + big)))
    pair = (inst_a, inst_b)
    base = [inst.seller.mean() for inst in pair]
    opt = [opt_welfare(inst) for inst in pair]
    gain = [[fixed_price_welfare(inst, q) - b for inst, b in zip(pair, base)]
            for q in regions]
    # variables (m1, m2, r): lottery mass on each region and the ratio;
    # leftover mass sits at a price that never trades
    cons = [((-gain[0][i], -gain[1][i], opt[i]), "<=", base[i]) for i in (0, 1)]
    cons.append(((1.0, 1.0, 0.0), "<=", 1.0))
    sol = lp_solve(lp_problem((0.0, 0.0, 1.0), cons, sense="max"))
    if sol.status != "optimal":
        raise RuntimeError(f"hardness program came back {sol.status}")
    return pair, float(sol.value)
