"""Finite factor-revealing programs bracketing the fixed-price ratio.

Two discretized programs pin down the worst-case ratio of the best
fixed-price mechanism from both sides. The lower program's global minimum
certifies a guarantee for mechanisms restricted to a finite price set; any
feasible point of the upper program converts into a concrete instance on
which no fixed price beats its objective value. A pair of min-max LPs
covers the setting where only one side's distribution is known.

Mass vectors s and b here are near-probability vectors produced by
discretize_distribution: they can sum to slightly more than one because
the tail above the top price collapses to (tail mean)/p_max.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field

import numpy as np

from .core import Instance, DiscreteDistribution, best_fixed_price, opt_welfare
from .numkernel import lp_problem, lp_solve, certified_binary_search


@dataclass(frozen=True)
class PriceGrid:
    """Strictly increasing nonnegative price levels, at least two of them."""

    prices: tuple

    def __post_init__(self):
        p = tuple(float(v) for v in self.prices)
        object.__setattr__(self, "prices", p)
        if len(p) < 2:
            raise ValueError("a price grid needs at least two levels")
        arr = np.asarray(p)
        if not np.all(np.isfinite(arr)) or p[0] < 0:
            raise ValueError("price levels must be finite and nonnegative")
        if np.any(np.diff(arr) <= 0):
            raise ValueError("price levels must be strictly increasing")

    @property
    def n(self) -> int:
        return len(self.prices)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.prices)

    def scaled(self, c: float) -> "PriceGrid":
        if c <= 0:
            raise ValueError("scale factor must be positive")
        return PriceGrid(tuple(v * c for v in self.prices))


# 16-level grid concentrating levels between 0.3 and 0.5, where worst-case
# instances put their mass, with a far anchor for high-value tails.
REFERENCE_GRID_16 = PriceGrid((0.0, 0.1, 0.19, 0.27, 0.315, 0.355, 0.395,
                               0.44, 0.485, 0.535, 0.595, 0.665, 0.74,
                               0.875, 1.195, 1000.0))


@dataclass(frozen=True)
class SolveInfo:
    """How a certificate was produced, including the bound pair.

    upper_bound is the objective of the feasible point returned;
    lower_bound, when present, is a proven bound on the program's global
    minimum and hence the number a ratio guarantee may cite. Heuristic
    modes leave it None on purpose.
    """

    mode: str
    iterations: int = 0
    nodes: int = 0
    restarts: int = 0
    lower_bound: float = None
    upper_bound: float = None
    gap: float = None
    converged: bool = True


@dataclass(frozen=True)
class GridCertificate:
    """Candidate solution (s, b, r) on a price grid, lower or upper role.

    Construction checks shapes only. Feasibility is verify_certificate's
    job, so infeasible candidates can still be carried around, reported,
    and serialized.
    """

    grid: PriceGrid
    s: tuple
    b: tuple
    r: float
    role: str
    info: SolveInfo = field(default=None, compare=False)

    def __post_init__(self):
        if self.role not in ("lower", "upper"):
            raise ValueError("role must be 'lower' or 'upper'")
        s = tuple(float(v) for v in self.s)
        b = tuple(float(v) for v in self.b)
        object.__setattr__(self, "s", s)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "r", float(self.r))
        if len(s) != self.grid.n or len(b) != self.grid.n:
            raise ValueError("mass vectors must match the grid length")
        if not all(np.isfinite(v) for v in s + b + (self.r,)):
            raise ValueError("certificate entries must be finite")
        if min(s + b) < -1e-9:
            raise ValueError("mass vectors must be nonnegative")


def welfare_rows(grid, s, b, *, inclusive) -> np.ndarray:
    """Welfare of each grid price against mass vectors s and b.

    Row t is sum_i s_i p_i plus the gains over seller/buyer pairs that the
    price at level t clears: sellers strictly below level t (also at t
    itself when inclusive) paired with buyers strictly above.
    """
    p = grid.as_array()
    s = np.asarray(s, dtype=float)
    b = np.asarray(b, dtype=float)
    tb = np.append(np.cumsum(b[::-1])[::-1], 0.0)       # sum_{j>=t} b_j
    tbp = np.append(np.cumsum((b * p)[::-1])[::-1], 0.0)
    hs = np.concatenate([[0.0], np.cumsum(s)])          # sum_{i<t} s_i
    hsp = np.concatenate([[0.0], np.cumsum(s * p)])
    t = np.arange(grid.n)
    k = t + 1 if inclusive else t
    gains = hs[k] * tbp[t + 1] - hsp[k] * tb[t + 1]
    return float(s @ p) + gains


def opt_quadratic(grid, s, b) -> float:
    """The two-sided optimum proxy sum_ij s_i b_j max(p_i, p_j)."""
    p = grid.as_array()
    return float(np.asarray(s, dtype=float)
                 @ np.maximum.outer(p, p)
                 @ np.asarray(b, dtype=float))


def discretize_distribution(d: DiscreteDistribution, grid: PriceGrid) -> np.ndarray:
    """Round a distribution onto the grid, preserving its mean exactly.

    Each cell [p_i, p_{i+1}) holding mass q with partial mean E is split
    across its two ends: left + right = q and left*p_i + right*p_{i+1} = E.
    Everything from p_max up collapses to mass (tail mean)/p_max at p_max.
    The output sums to between 1 and 1 + mean/p_max, its prefix sums
    dominate the distribution's CDF at every level, and its inner product
    with the grid reproduces the mean.
    """
    p = grid.as_array()
    v, m = d.values, d.masses
    if np.any(v < p[0]):
        raise ValueError("distribution has mass below the bottom price level")
    n = grid.n
    s = np.zeros(n)
    cell = np.searchsorted(p, v, side="right") - 1
    for i in range(n - 1):
        sel = cell == i
        q = float(m[sel].sum())
        if q == 0.0:
            continue
        e = float((m[sel] * v[sel]).sum())
        right = (e - q * p[i]) / (p[i + 1] - p[i])
        s[i] += q - right
        s[i + 1] += right
    tail = cell == n - 1
    s[n - 1] += float((m[tail] * v[tail]).sum()) / p[n - 1]
    s = np.maximum(s, 0.0)
    _check_discretization(d, grid, s)
    return s


def _check_discretization(d, grid, s):
    # These hold by construction, so a failure here means a bug, not bad input.
    p = grid.as_array()
    mean = d.mean()
    tol = 1e-12 * max(1.0, mean)
    total = float(s.sum())
    if not 1.0 - 1e-12 <= total <= 1.0 + mean / p[-1] + tol:
        raise AssertionError("discretized mass left its envelope")
    if float(s[:-1].sum()) > 1.0 + 1e-12:
        raise AssertionError("mass below the top level exceeds one")
    prefix = np.cumsum(s)
    below = np.array([float(d.masses[d.values < level].sum()) for level in p])
    if np.any(prefix < below - 1e-12):
        raise AssertionError("prefix sums fail to dominate the CDF")
    if abs(float(s @ p) - mean) > tol:
        raise AssertionError("discretization moved the mean")


@dataclass(frozen=True)
class CertificateReport:
    """Feasibility report with one slack per constraint.

    Every slack is oriented so that nonnegative means satisfied with
    margin; feasible is simply worst_slack >= -tol. tight_index is the
    0-based row whose welfare expression attains the maximum.
    """

    feasible: bool
    role: str
    r: float
    r_tight: bool
    tight_index: int
    opt_value: float
    rows: tuple
    row_slacks: tuple
    mass_slacks: dict
    worst_slack: float

    def to_json_dict(self) -> dict:
        return {
            "feasible": self.feasible,
            "role": self.role,
            "r": self.r,
            "r_tight": self.r_tight,
            "tight_index": self.tight_index,
            "opt_value": self.opt_value,
            "rows": list(self.rows),
            "row_slacks": list(self.row_slacks),
            "mass_slacks": dict(self.mass_slacks),
            "worst_slack": self.worst_slack,
        }


def verify_certificate(c: GridCertificate, tol: float = 1e-9) -> CertificateReport:
    """Check every constraint of the certificate's role and report slacks.

    Infeasibility is a report, not an error. Also reports whether r equals
    the maximum welfare row (an upper-role certificate must be tight in
    that sense before it can be turned into a hard instance).
    """
    p = c.grid.as_array()
    s = np.asarray(c.s)
    b = np.asarray(c.b)
    rows = welfare_rows(c.grid, s, b, inclusive=(c.role == "upper"))
    opt = opt_quadratic(c.grid, s, b)
    if c.role == "lower":
        win = 1.0 + 1.0 / p[-1]
        mass = {
            "sum_s_low": float(s.sum() - 1.0),
            "sum_s_high": float(win - s.sum()),
            "sum_b_low": float(b.sum() - 1.0),
            "sum_b_high": float(win - b.sum()),
        }
    else:
        mass = {
            "sum_s_eq": -abs(float(s.sum()) - 1.0),
            "sum_b_eq": -abs(float(b.sum()) - 1.0),
        }
    mass["nonneg"] = float(min(s.min(), b.min()))
    mass["opt"] = opt - 1.0
    row_slacks = c.r - rows
    worst = min(min(mass.values()), float(row_slacks.min()))
    tight = int(np.argmax(rows))
    return CertificateReport(
        feasible=bool(worst >= -tol),
        role=c.role,
        r=c.r,
        r_tight=bool(abs(c.r - float(rows[tight])) <= tol),
        tight_index=tight,
        opt_value=opt,
        rows=tuple(float(w) for w in rows),
        row_slacks=tuple(float(w) for w in row_slacks),
        mass_slacks=mass,
        worst_slack=float(worst),
    )


def _row_coeffs_free_s(grid, b, inclusive):
    # G[t, i] multiplies s_i in welfare row t when b is held fixed.
    p = grid.as_array()
    n = grid.n
    b = np.asarray(b, dtype=float)
    tb = np.append(np.cumsum(b[::-1])[::-1], 0.0)
    tbp = np.append(np.cumsum((b * p)[::-1])[::-1], 0.0)
    i = np.arange(n)
    take = i[None, :] <= i[:, None] if inclusive else i[None, :] < i[:, None]
    return p[None, :] + take * (tbp[1:, None] - tb[1:, None] * p[None, :])


def _row_coeffs_free_b(grid, s, inclusive):
    # C[t, j] multiplies b_j in welfare row t when s is held fixed; the
    # constant part sum_i s_i p_i is not included.
    p = grid.as_array()
    n = grid.n
    s = np.asarray(s, dtype=float)
    hs = np.concatenate([[0.0], np.cumsum(s)])
    hsp = np.concatenate([[0.0], np.cumsum(s * p)])
    k = np.arange(1, n + 1) if inclusive else np.arange(n)
    j = np.arange(n)
    take = j[None, :] > j[:, None]
    return take * (p[None, :] * hs[k][:, None] - hsp[k][:, None])


def _half_step(grid, fixed, free, role):
    """One LP over (free side, r) with the other side's masses held fixed.

    The quadratic optimum constraint is linear once a side is pinned, so
    each half problem is an honest LP, no relaxation involved. Returns the
    optimizing mass vector and its objective r.
    """
    p = grid.as_array()
    n = grid.n
    inclusive = role == "upper"
    M = np.maximum.outer(p, p)
    if free == "s":
        G = _row_coeffs_free_s(grid, fixed, inclusive)
        h = M @ np.asarray(fixed, dtype=float)
        rhs_shift = np.zeros(n)
    else:
        G = _row_coeffs_free_b(grid, fixed, inclusive)
        h = M @ np.asarray(fixed, dtype=float)
        rhs_shift = np.full(n, float(np.asarray(fixed) @ p))
    cons = []
    ones = [1.0] * n + [0.0]
    if role == "lower":
        cons.append((ones, ">=", 1.0))
        cons.append((ones, "<=", 1.0 + 1.0 / p[-1]))
    else:
        cons.append((ones, "=", 1.0))
    cons.append((list(h) + [0.0], ">=", 1.0))
    for t in range(n):
        cons.append((list(G[t]) + [-1.0], "<=", -rhs_shift[t]))
    obj = [0.0] * n + [1.0]
    sol = lp_solve(lp_problem(obj, cons))
    if sol.status != "optimal":
        raise RuntimeError(f"half step LP came back {sol.status}")
    return sol.x[:n], float(sol.value)


def _alternate(grid, role, b0, rounds):
    """Alternate the two half LPs from a starting buyer vector.

    The objective never increases: the previous half's optimum stays
    feasible for the next, so the sequence of r values is monotone and the
    loop stops once it stalls. The fixed point is a feasible certificate
    whose r only upper-bounds the program's global minimum.
    """
    b = np.asarray(b0, dtype=float)
    s, r = _half_step(grid, b, "s", role)
    done = 0
    for done in range(1, rounds + 1):
        b, _ = _half_step(grid, s, "b", role)
        s, r_s = _half_step(grid, b, "s", role)
        if r - r_s < 1e-12:
            r = r_s
            break
        r = r_s
    rows = welfare_rows(grid, s, b, inclusive=(role == "upper"))
    return s, b, float(rows.max()), done


def lowerop_solve(grid: PriceGrid, mode: str = "branch_and_bound", *,
                  node_budget: int = 200_000, gap_tol: float = 1e-4,
                  rounds: int = 60) -> GridCertificate:
    """Minimize the worst welfare row subject to the guarantee constraints.

    The program: mass windows sum(s), sum(b) in [1, 1 + 1/p_max], the
    quadratic optimum at least 1, and every exclusive welfare row at most
    r. Its global minimum is a certified ratio guarantee for the mechanism
    that picks the best grid price times the observed optimum.

    alternating mode fixes one side and solves the LP in the other,
    back and forth to a stationary point; its r only upper-bounds the
    global minimum, so info.lower_bound stays None. branch_and_bound mode
    relaxes the bilinear products with envelope inequalities, branches on
    the worst violation, and reports a proven bound pair even when the
    node budget runs out.
    """
    if grid.prices[0] != 0.0:
        raise ValueError("the lower program needs a grid starting at 0")
    if mode == "alternating":
        s, b, r, iters, stationary = _best_alternate(grid, rounds)
        info = SolveInfo(mode="alternating", iterations=iters,
                         upper_bound=r, converged=stationary)
        return GridCertificate(grid, tuple(s), tuple(b), r, "lower", info)
    if mode != "branch_and_bound":
        raise ValueError(f"unknown mode {mode!r}")
    if grid.n > 24:
        raise ValueError("dense branch and bound is limited to 24 levels")
    return _branch_and_bound(grid, node_budget, gap_tol)


def _exact_incumbent(grid, b):
    # One honest LP in (s, r) for a pinned b: always feasible because the
    # mass windows allow enough weight at the top level to cover the
    # optimum constraint.
    s, r = _half_step(grid, np.asarray(b, dtype=float), "s", "lower")
    rows = welfare_rows(grid, s, b, inclusive=False)
    return s, float(rows.max())


def _best_alternate(grid, rounds):
    # Alternating descent stalls wherever it starts, so run a few cheap
    # deterministic starts and keep the best stationary point. The uniform
    # start in particular can freeze immediately on wide grids.
    p = grid.as_array()
    n = grid.n
    inv = 1.0 / (1.0 + p)
    starts = [np.full(n, 1.0 / n), inv / inv.sum()]
    if n >= 2:
        low2 = np.zeros(n)
        low2[0] = low2[1] = 0.5
        starts.append(low2)
    best = None
    total = 0
    for b0 in starts:
        s, b, r, iters = _alternate(grid, "lower", b0, rounds)
        total += iters
        if best is None or r < best[2]:
            best = (s, b, r, iters < rounds)
    return best[0], best[1], best[2], total, best[3]


def _mccormick_rows(n, nz_off, ls, us, lb, ub, nv):
    rows = []
    for i in range(n):
        for j in range(n):
            z = nz_off + i * n + j
            lo_s, hi_s = ls[i], us[i]
            lo_b, hi_b = lb[j], ub[j]
            if lo_s > 0.0 or lo_b > 0.0:
                row = [0.0] * nv
                row[z] = 1.0
                row[i] = -lo_b
                row[n + j] = -lo_s
                rows.append((row, ">=", -lo_s * lo_b))
            row = [0.0] * nv
            row[z] = 1.0
            row[i] = -hi_b
            row[n + j] = -hi_s
            rows.append((row, ">=", -hi_s * hi_b))
            row = [0.0] * nv
            row[z] = 1.0
            row[i] = -lo_b
            row[n + j] = -hi_s
            rows.append((row, "<=", -hi_s * lo_b))
            row = [0.0] * nv
            row[z] = 1.0
            row[i] = -hi_b
            row[n + j] = -lo_s
            rows.append((row, "<=", -lo_s * hi_b))
    return rows


def _branch_and_bound(grid, node_budget, gap_tol):
    p = grid.as_array()
    n = grid.n
    cap = 1.0 + 1.0 / p[-1]
    M = np.maximum.outer(p, p)
    nz_off = 2 * n
    nv = 2 * n + n * n + 1

    # Static rows: mass windows, the optimum constraint on the product
    # variables, and one welfare row per level.
    static = []
    s_ones = [1.0] * n + [0.0] * (n + n * n + 1)
    b_ones = [0.0] * n + [1.0] * n + [0.0] * (n * n + 1)
    static.append((s_ones, ">=", 1.0))
    static.append((s_ones, "<=", cap))
    static.append((b_ones, ">=", 1.0))
    static.append((b_ones, "<=", cap))
    opt_row = [0.0] * nv
    for i in range(n):
        for j in range(n):
            opt_row[nz_off + i * n + j] = M[i, j]
    static.append((opt_row, ">=", 1.0))
    for t in range(n):
        row = [0.0] * nv
        for i in range(n):
            row[i] = p[i]
        for i in range(t):
            for j in range(t + 1, n):
                row[nz_off + i * n + j] = p[j] - p[i]
        row[-1] = -1.0
        static.append((row, "<=", 0.0))
    obj = [0.0] * (nv - 1) + [1.0]

    def solve_box(ls, us, lb, ub, objective=None, extra=()):
        bounds = ([(ls[i], us[i]) for i in range(n)]
                  + [(lb[j], ub[j]) for j in range(n)]
                  + [(0.0, us[i] * ub[j]) for i in range(n) for j in range(n)]
                  + [(0.0, None)])
        cons = static + _mccormick_rows(n, nz_off, ls, us, lb, ub, nv)
        cons.extend(extra)
        # Aggregate product rows: the z block's row i sums to s_i times the
        # total buyer mass, so box-clamped mass bounds pin it from both
        # sides (and likewise per column). These cut far deeper than the
        # pairwise envelopes alone.
        s_lo, s_hi = max(1.0, float(ls.sum())), min(cap, float(us.sum()))
        b_lo, b_hi = max(1.0, float(lb.sum())), min(cap, float(ub.sum()))
        for i in range(n):
            row = [0.0] * nv
            for j in range(n):
                row[nz_off + i * n + j] = 1.0
            row[i] = -b_hi
            cons.append((list(row), "<=", 0.0))
            row[i] = -b_lo
            cons.append((row, ">=", 0.0))
        for j in range(n):
            row = [0.0] * nv
            for i in range(n):
                row[nz_off + i * n + j] = 1.0
            row[n + j] = -s_hi
            cons.append((list(row), "<=", 0.0))
            row[n + j] = -s_lo
            cons.append((row, ">=", 0.0))
        return lp_solve(lp_problem(obj if objective is None else objective,
                                   cons, bounds=bounds))

    inc_s, inc_r = _exact_incumbent(grid, np.full(n, 1.0 / n))
    inc_b = np.full(n, 1.0 / n)
    s0, b0, r0, _, _ = _best_alternate(grid, 40)
    if r0 < inc_r:
        inc_s, inc_b, inc_r = s0, b0, r0

    # Root box tightening: push each mass coordinate to its extremes over
    # the relaxation cut down to the incumbent's level set. Every optimum
    # survives that cut, and the coordinates that must sit near zero get
    # pinned to slivers instead of keeping the whole [0, cap] range. Each
    # probe is a full-size LP, so only small grids earn the 4n solves.
    ls0, us0 = np.zeros(n), np.full(n, cap)
    lb0, ub0 = np.zeros(n), np.full(n, cap)
    level_cap = (tuple([0.0] * (nv - 1) + [1.0]), "<=", inc_r + 1e-9)
    probes = range(2 * n) if n <= 8 else range(0)
    for k in probes:
        for sense in (1.0, -1.0):
            e = [0.0] * nv
            e[k] = sense
            sol = solve_box(ls0, us0, lb0, ub0, objective=e, extra=(level_cap,))
            if sol.status != "optimal":
                continue
            v = float(sol.x[k])
            tgt, idx = (("s", k) if k < n else ("b", k - n))
            if tgt == "s":
                if sense > 0:
                    ls0[idx] = max(ls0[idx], min(v - 1e-9, cap))
                else:
                    us0[idx] = min(us0[idx], max(v + 1e-9, 0.0))
            else:
                if sense > 0:
                    lb0[idx] = max(lb0[idx], min(v - 1e-9, cap))
                else:
                    ub0[idx] = min(ub0[idx], max(v + 1e-9, 0.0))
    ls0, lb0 = np.maximum(ls0, 0.0), np.maximum(lb0, 0.0)

    weight = M + 1.0
    box0 = (ls0, us0, lb0, ub0)
    sol0 = solve_box(*box0)
    if sol0.status != "optimal":
        raise RuntimeError(f"root relaxation came back {sol0.status}")
    nodes = 1
    counter = 0
    heap = [(float(sol0.value), counter, box0, sol0.x)]
    # Bounds of regions set aside without being fully resolved; they keep
    # the final lower bound honest even when exploration stops early.
    stalled = []
    while heap and nodes + 2 <= node_budget:
        bound, _, box, x = heapq.heappop(heap)
        if bound >= inc_r - 1e-12:
            continue
        if inc_r - bound <= gap_tol:
            # Best-bound order means every remaining region is within the
            # gap too, so this is convergence, not abandonment.
            heapq.heappush(heap, (bound, counter + 10 ** 9, box, x))
            break
        s_val, b_val = x[:n], x[n:2 * n]
        z_val = x[nz_off:nz_off + n * n].reshape(n, n)
        viol = np.abs(z_val - np.outer(s_val, b_val)) * weight
        i, j = np.unravel_index(int(np.argmax(viol)), viol.shape)
        ls, us, lb, ub = (v.copy() for v in box)
        if viol[i, j] <= 1e-9 or max(us[i] - ls[i], ub[j] - lb[j]) <= 1e-9:
            # The relaxation is essentially exact here; harvest a true
            # feasible point and set the region aside with its bound.
            s_fix, r_fix = _exact_incumbent(grid, np.maximum(b_val, 0.0))
            if r_fix < inc_r:
                inc_s, inc_b, inc_r = s_fix, np.maximum(b_val, 0.0), r_fix
            stalled.append(bound)
            continue
        if us[i] - ls[i] >= ub[j] - lb[j]:
            lo, hi, val, side = ls[i], us[i], s_val[i], "s"
        else:
            lo, hi, val, side = lb[j], ub[j], b_val[j], "b"
        w = hi - lo
        cut = min(max(val, lo + 0.2 * w), hi - 0.2 * w)
        for half in ("low", "high"):
            cls, cus, clb, cub = ls.copy(), us.copy(), lb.copy(), ub.copy()
            if side == "s":
                if half == "low":
                    cus[i] = cut
                else:
                    cls[i] = cut
            else:
                if half == "low":
                    cub[j] = cut
                else:
                    clb[j] = cut
            sol = solve_box(cls, cus, clb, cub)
            nodes += 1
            if sol.status != "optimal":
                continue
            child = float(sol.value)
            cs, cb = sol.x[:n], sol.x[n:2 * n]
            if opt_quadratic(grid, cs, cb) >= 1.0 - 1e-9:
                rc = float(welfare_rows(grid, cs, cb, inclusive=False).max())
                if rc < inc_r:
                    inc_s, inc_b, inc_r = cs, cb, rc
            if child < inc_r - 1e-12:
                counter += 1
                heapq.heappush(heap, (child, counter, (cls, cus, clb, cub), sol.x))
    lower = min([inc_r] + [h[0] for h in heap] + stalled)
    gap = inc_r - lower
    info = SolveInfo(mode="branch_and_bound", nodes=nodes,
                     lower_bound=float(lower), upper_bound=float(inc_r),
                     gap=float(gap), converged=bool(gap <= gap_tol))
    return GridCertificate(grid, tuple(inc_s), tuple(inc_b), float(inc_r),
                           "lower", info)


def upperop_search(grid: PriceGrid, restarts: int = 8, *, seed: int = 0,
                   rounds: int = 40, init=None) -> GridCertificate:
    """Search for a low-objective feasible point of the hardness program.

    The program: s and b on the probability simplex, the quadratic optimum
    at least 1, and every inclusive welfare row at most r. Any feasible
    point is a valid hardness witness, so plain alternating descent with
    random restarts is enough; no global optimality is claimed.

    If the grid's top level is below 1 the whole grid is scaled up so the
    optimum constraint stays satisfiable; the certificate then carries the
    scaled grid (the objective is scale-free in the sense that the ratio
    statement it encodes is unchanged).

    init, when given, is a (s0, b0) pair whose b0 seeds the first restart.
    """
    work = grid if grid.prices[-1] >= 1.0 else grid.scaled(1.0 / grid.prices[-1])
    n = work.n
    best = None
    iters_total = 0
    for k in range(restarts):
        if k == 0:
            b0 = np.full(n, 1.0 / n) if init is None else np.asarray(init[1], dtype=float)
        else:
            b0 = np.random.default_rng(seed + k).dirichlet(np.ones(n))
        s, b, r, iters = _alternate(work, "upper", b0, rounds)
        iters_total += iters
        key = (r, tuple(s), tuple(b))
        if best is None or key < best:
            best = key
    r, s, b = best[0], best[1], best[2]
    info = SolveInfo(mode="upperop_alternating", iterations=iters_total,
                     restarts=restarts, upper_bound=r)
    return GridCertificate(work, s, b, r, "upper", info)


def upperop_to_instance(c: GridCertificate) -> Instance:
    """Turn a tight upper-role certificate into a hard instance.

    Sellers sit just above each level (tie rank 1) with masses s, buyers
    exactly at each level (tie rank 0) with masses b. With that tie
    layout the price at (level t, rank 1) collects exactly welfare row t,
    prices between levels collect nothing extra, and the instance optimum
    equals the certificate's quadratic form, so the best fixed price
    achieves at most fraction r of the optimum. Verified before returning.
    """
    if c.role != "upper":
        raise ValueError("hard instances come from upper-role certificates")
    report = verify_certificate(c)
    if not report.feasible or not report.r_tight:
        raise ValueError("certificate must be feasible and tight in r")
    p = c.grid.prices
    s = np.asarray(c.s)
    b = np.asarray(c.b)
    seller = tuple((p[i], 1.0, s[i] / s.sum()) for i in range(c.grid.n) if s[i] > 0)
    buyer = tuple((p[j], 0.0, b[j] / b.sum()) for j in range(c.grid.n) if b[j] > 0)
    inst = Instance(DiscreteDistribution(seller), DiscreteDistribution(buyer))
    _, best_w = best_fixed_price(inst)
    if best_w > (c.r + 1e-9) * opt_welfare(inst):
        raise AssertionError("conversion produced a better price than promised")
    return inst


def one_sided_value(grid: PriceGrid, fixed_side: str, fixed_vector, r: float,
                    cap: float = None):
    """Best guaranteed margin of a price lottery when one side is known.

    With, say, the buyer's mass vector pinned, the adversary picks the
    seller's masses from {x >= 0, sum of all but the last at most 1, total
    at least 1, last coordinate at most cap} and the mechanism picks a
    lottery over grid prices. The value is

        max over lotteries, min over adversary masses of
        expected welfare row - r * quadratic optimum.

    Nonnegative value at ratio r means the lottery guarantees an r
    fraction of the optimum against every adversary in the set. The inner
    minimum is replaced by its LP dual, so a single LP does the job.
    Returns (value, lottery weights).
    """
    if fixed_side not in ("buyer", "seller"):
        raise ValueError("fixed_side must be 'buyer' or 'seller'")
    if not 0.0 <= r <= 1.0:
        raise ValueError("ratio must lie in [0, 1]")
    if cap is None:
        cap = 10.0
    if cap <= 0:
        raise ValueError("cap must be positive")
    p = grid.as_array()
    n = grid.n
    vec = np.asarray(fixed_vector, dtype=float)
    if vec.shape != (n,) or np.any(vec < 0) or not np.all(np.isfinite(vec)):
        raise ValueError("fixed vector must be a nonnegative vector on the grid")
    M = np.maximum.outer(p, p)
    h = M @ vec
    if fixed_side == "buyer":
        G = _row_coeffs_free_s(grid, vec, False)
        const = 0.0
    else:
        G = _row_coeffs_free_b(grid, vec, False)
        const = float(vec @ p)
    # Variables: lottery weights omega (n), then the three dual
    # multipliers of the adversary's mass constraints.
    obj = [0.0] * n + [-1.0, 1.0, -cap]
    cons = []
    for i in range(n):
        row = list(-G[:, i]) + [-1.0, 1.0, 0.0]
        if i == n - 1:
            row[n], row[n + 2] = 0.0, -1.0
        cons.append((row, "<=", -r * h[i]))
    cons.append(([1.0] * n + [0.0, 0.0, 0.0], "=", 1.0))
    sol = lp_solve(lp_problem(obj, cons, sense="max"))
    if sol.status != "optimal":
        raise RuntimeError(f"one-sided LP came back {sol.status}")
    return float(sol.value) + const, sol.x[:n]


def one_sided_certify(grid: PriceGrid, fixed_side: str, fixed_vector, *,
                      cap: float = None, slack: float = 1e-9,
                      iters: int = 60) -> float:
    """Largest ratio the one-sided value still supports, by bisection.

    The value is nonincreasing in r, so bisection applies; the returned
    ratio is one the LP actually certified nonnegative (up to slack),
    never an untested midpoint.
    """
    def check(r):
        value, _ = one_sided_value(grid, fixed_side, fixed_vector, r, cap)
        return value >= -slack

    if check(1.0):
        return 1.0
    return certified_binary_search(check, 0.0, 1.0, iters)


def convergence_bracket(base_grid_step: float, range_cap: float, *,
                        node_budget: int = 4000, restarts: int = 8,
                        seed: int = 0):
    """Bracket the true worst-case ratio with a uniform grid.

    Builds levels 0, step, 2*step, ... up to the cap plus a far anchor at
    1000. The lower side is the proven branch-and-bound bound (run on an
    evenly thinned copy when the grid is too large for the dense solver;
    any grid's guarantee is a valid lower bound for the unrestricted
    problem). The upper side is the best hardness witness the alternating
    search finds on the full grid. Both sides bound the same quantity, so
    lower <= upper always.
    """
    if base_grid_step <= 0:
        raise ValueError("grid step must be positive")
    if range_cap <= base_grid_step:
        raise ValueError("range cap must exceed the grid step")
    k = int(np.floor(range_cap / base_grid_step + 1e-9))
    levels = [i * base_grid_step for i in range(k + 1)]
    if levels[-1] < 1000.0:
        levels.append(1000.0)
    grid = PriceGrid(tuple(levels))
    if grid.n <= 12:
        sub = grid
    else:
        idx = sorted(set(np.linspace(0, grid.n - 1, 12).round().astype(int)))
        sub = PriceGrid(tuple(grid.prices[i] for i in idx))
    lower_cert = lowerop_solve(sub, "branch_and_bound", node_budget=node_budget)
    upper_cert = upperop_search(grid, restarts, seed=seed)
    return float(lower_cert.info.lower_bound), float(upper_cert.r)


def certificate_to_json(c: GridCertificate) -> dict:
    return {"role": c.role, "prices": list(c.grid.prices),
            "s": list(c.s), "b": list(c.b), "r": c.r}


def certificate_from_json(obj) -> GridCertificate:
    if not isinstance(obj, dict):
        raise ValueError("certificate JSON must be an object")
    missing = {"role", "prices", "s", "b", "r"} - set(obj)
    if missing:
        raise ValueError(f"certificate JSON missing {sorted(missing)}")
    return GridCertificate(PriceGrid(tuple(obj["prices"])),
                           tuple(obj["s"]), tuple(obj["b"]),
                           float(obj["r"]), obj["role"])
