"""Parametric geometry: trajectories, the predicted 3-system with exact-log
breakpoint algebra, validity checking, brute-force and candidate successive
minima, Mahler duality checks, comparison reports, and CSV/SVG export.

Throughout this module norms are Euclidean.  For a nonzero integer point x and
u = (1, xi, xi^2):

    L_x(q)  = max(log|x|, log|x.u| + q)        (primal trajectory)
    L*_x(q) = max(log|x^u|, log|x| - q)        (dual trajectory)

L_j(q) (j = 1,2,3) are the logs of the successive minima of the corresponding
convex bodies with respect to Z^3.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import mpmath

from .exactlin import DEFAULT_PRECISION, SymVec, ZeroObject, det3
from .approx import Bundle
from .matseq import HatW, DegenerateGrowth, delta_estimate
from .sturm import quantities
from . import kernels


class TooLarge(ValueError):
    pass


class NoCandidates(ValueError):
    pass


# ---------------------------------------------------------------------------
# exact-log linear expressions
# ---------------------------------------------------------------------------

class LinExpr:
    """Exact linear combination  sum  c[(s, p)] * delta^p * anchor_s  where
    anchor_0 = log W-hat_{k0-1}, anchor_1 = log W-hat_{k0}, with Fraction
    coefficients.  Everything in the breakpoint algebra lives here."""

    __slots__ = ("c",)

    def __init__(self, c=None):
        self.c = dict(c or {})

    @staticmethod
    def anchor(s: int, coeff=1) -> "LinExpr":
        return LinExpr({(s, 0): Fraction(coeff)})

    def __add__(self, other: "LinExpr") -> "LinExpr":
        out = dict(self.c)
        for k, v in other.c.items():
            out[k] = out.get(k, Fraction(0)) + v
            if out[k] == 0:
                del out[k]
        return LinExpr(out)

    def __sub__(self, other: "LinExpr") -> "LinExpr":
        return self + other.scale(-1)

    def scale(self, f) -> "LinExpr":
        f = Fraction(f)
        if f == 0:
            return LinExpr()
        return LinExpr({k: v * f for k, v in self.c.items()})

    def mul_delta_poly(self, poly: dict) -> "LinExpr":
        """Multiply by sum_p poly[p] * delta^p."""
        out = {}
        for (s, p), v in self.c.items():
            for dp, f in poly.items():
                key = (s, p + dp)
                out[key] = out.get(key, Fraction(0)) + v * Fraction(f)
        return LinExpr({k: v for k, v in out.items() if v != 0})

    def __eq__(self, other):
        return isinstance(other, LinExpr) and self.c == other.c

    def eval(self, a0, a1, delta):
        total = mpmath.mpf(0)
        anchors = (a0, a1)
        for (s, p), v in self.c.items():
            term = mpmath.mpf(v.numerator) / v.denominator * anchors[s]
            if p:
                term *= delta ** p
            total += term
        return total

    def __repr__(self):
        return f"LinExpr({self.c})"


# ---------------------------------------------------------------------------
# piecewise-linear component functions
# ---------------------------------------------------------------------------

@dataclass
class PLFunc:
    """Continuous piecewise-linear function with at most one kink.

    value = left_a + left_b * q  for q <= kink_q, right_a + right_b * q after;
    kink_q None means a single piece (the left one).
    """

    left_a: object
    left_b: int
    kink_q: Optional[object] = None
    right_a: Optional[object] = None
    right_b: Optional[int] = None
    label: str = ""

    def value(self, q):
        if self.kink_q is not None and q > self.kink_q:
            return self.right_a + self.right_b * q
        return self.left_a + self.left_b * q

    def slope(self, q):
        """Slope on the smooth piece containing q (right-continuous choice)."""
        if self.kink_q is not None and q >= self.kink_q:
            return self.right_b
        return self.left_b

    def kinks_in(self, q_lo, q_hi):
        if self.kink_q is not None and q_lo < self.kink_q < q_hi:
            return [self.kink_q]
        return []

    def pieces(self, q_lo, q_hi):
        """[(a, b)] linear pieces over [q_lo, q_hi]."""
        out = []
        if self.kink_q is None or self.kink_q >= q_hi:
            out.append((self.left_a, self.left_b))
        elif self.kink_q <= q_lo:
            out.append((self.right_a, self.right_b))
        else:
            out.append((self.left_a, self.left_b))
            out.append((self.right_a, self.right_b))
        return out


@dataclass
class Window:
    q_lo: object
    q_hi: object
    funcs: list          # three PLFunc (unsorted components)
    meta: dict = field(default_factory=dict)


# ---------------------------------------------------------------------------
# the predicted system
# ---------------------------------------------------------------------------

@dataclass
class HatData:
    i: int
    k: int
    l: int
    logY: LinExpr
    logZ: LinExpr
    logE: LinExpr
    logEstar: LinExpr
    q: LinExpr
    c: LinExpr
    a: LinExpr          # -hatL*_i meets hatL_{t_{k+1}} (left end of I_i)
    b: LinExpr          # -hatL*_i meets hatL_i (right end of I_i)


class SystemBreakpoints:
    """Breakpoint data and the map P = Phi_3(hatL_{t_{k+1}}, -hatL*_{i+1},
    hatL_{i+1}) on [c_i, c_{i+1}), for windows i in [t_{k_lo}-1, t_{k_hi}-2]."""

    def __init__(self, bundle: Bundle, k_range, delta=None, k0: Optional[int] = None,
                 prec: int = DEFAULT_PRECISION):
        self.bundle = bundle
        self.prog = bundle.prog
        self.prec = prec
        self.k_lo, self.k_hi = k_range
        if self.k_hi < self.k_lo + 2:
            raise ValueError("k_range must span at least two indices")
        self.k0 = k0 if k0 is not None else max(2, self.k_lo)
        self.hatw = HatW(bundle.seq, k0=self.k0, prec=prec)
        # Rescale the anchor pair by the limit of log W-hat_k / log |w_k| so
        # that the exact-recurrence values track the true log norms up to O(1)
        # (the raw recurrence drifts linearly because the per-step
        # multiplicativity defect compounds).
        K = self.k_hi + 4
        with mpmath.workprec(prec):
            rho = self.hatw.log(K) / bundle.seq.log_norm(K, prec)
            self._anchor_vals = (self.hatw.anchors[0] / rho,
                                 self.hatw.anchors[1] / rho)
            self.hat_scale = rho
        with mpmath.workprec(prec):
            qs = quantities(self.prog, prec=prec)
            self.sigma = qs.sigma
            threshold = qs.sigma / (1 + qs.sigma)
            self.delta_frac = None
            if delta is None:
                rep = delta_estimate(bundle.seq, min(self.k_hi, 18), prec)
                if rep.exact_zero:
                    self.delta = mpmath.mpf(0)
                    self.delta_frac = Fraction(0)
                    self.delta_source = "exact (unimodular seed)"
                elif rep.bracket is not None:
                    self.delta = (rep.bracket[0] + rep.bracket[1]) / 2
                    self.delta_source = f"bracket midpoint {rep.bracket}"
                else:
                    self.delta = rep.delta_hat
                    self.delta_source = "empirical delta_hat"
            else:
                if isinstance(delta, Fraction) or isinstance(delta, int):
                    self.delta_frac = Fraction(delta)
                self.delta = mpmath.mpf(str(delta)) if not isinstance(delta, mpmath.mpf) else delta
                self.delta_source = "forced"
            self.invalid_delta = bool(self.delta >= threshold)
        self._idx = {}
        self._wexp = {}
        self._d_k = {}
        for i in range(self.prog.t(self.k_lo) - 1, self.prog.t(self.k_hi) + 1):
            self._idx[i] = self._build(i)
        for k in range(self.k_lo, self.k_hi):
            # hatL_{t_k} (rising) meets hatL_{t_{k+1}} (flat)
            self._d_k[k] = (self._wk(k).scale(Fraction(3)) + self._wk(k - 1)
                            ).mul_delta_poly({0: 1}) - (
                self._wk(k) + self._wk(k - 1)).mul_delta_poly({1: 1})

    # -- symbolic builders --------------------------------------------------
    def _wk(self, k: int) -> LinExpr:
        if k not in self._wexp:
            a, b = self.hatw.coeffs(k)
            e = LinExpr()
            if a:
                e = e + LinExpr.anchor(0, a)
            if b:
                e = e + LinExpr.anchor(1, b)
            self._wexp[k] = e
        return self._wexp[k]

    def _build(self, i: int) -> HatData:
        k, l = self.prog.block_of(i)
        wk, wk1 = self._wk(k), self._wk(k - 1)
        logY = wk.scale(l + 1) + wk1
        logZ = wk.scale(l) + wk1
        # log E_i = ((delta-1)(l+1) - 1) log W_k + (delta-1) log W_{k-1}
        logE = (wk.mul_delta_poly({0: -(l + 1) - 1, 1: l + 1})
                + wk1.mul_delta_poly({0: -1, 1: 1}))
        logEstar = logY.mul_delta_poly({0: -1, 1: 1})
        q_i = logY.mul_delta_poly({0: 2, 1: -1})
        c_i = q_i + wk
        a_i = logY + self._wk(k)          # log Y_i + log Z-hat_{t_{k+1}}
        b_i = logEstar.scale(-1) - logE
        return HatData(i=i, k=k, l=l, logY=logY, logZ=logZ, logE=logE,
                       logEstar=logEstar, q=q_i, c=c_i, a=a_i, b=b_i)

    def data(self, i: int) -> HatData:
        return self._idx[i]

    def num(self, e: LinExpr):
        with mpmath.workprec(self.prec):
            return e.eval(self._anchor_vals[0], self._anchor_vals[1], self.delta)

    # -- component functions ------------------------------------------------
    def hatL(self, i: int) -> PLFunc:
        d = self._idx[i]
        return PLFunc(left_a=self.num(d.logZ), left_b=0, kink_q=self.num(d.q),
                      right_a=self.num(d.logE), right_b=1, label=f"hatL[{i}]")

    def neg_hatLstar(self, i: int) -> PLFunc:
        d = self._idx[i]
        return PLFunc(left_a=-self.num(d.logY), left_b=1, kink_q=self.num(d.q),
                      right_a=-self.num(d.logEstar), right_b=0,
                      label=f"-hatL*[{i}]")

    # -- windows ------------------------------------------------------------
    def window_index_range(self):
        return range(self.prog.t(self.k_lo) - 1, self.prog.t(self.k_hi) - 1)

    def window(self, i: int) -> Window:
        k = self.prog.block_of(i + 1)[0]
        return Window(
            q_lo=self.num(self._idx[i].c),
            q_hi=self.num(self._idx[i + 1].c),
            funcs=[self.hatL(self.prog.t(k + 1)), self.neg_hatLstar(i + 1),
                   self.hatL(i + 1)],
            meta={"i": i, "k": k},
        )

    def pieces(self, q_span=None):
        out = []
        for i in self.window_index_range():
            w = self.window(i)
            if q_span is not None and (w.q_hi <= q_span[0] or w.q_lo >= q_span[1]):
                continue
            out.append(w)
        return out

    @property
    def span(self):
        lo = self.num(self._idx[self.prog.t(self.k_lo) - 1].c)
        hi = self.num(self._idx[self.prog.t(self.k_hi) - 1].c)
        return (lo, hi)

    def P(self, q):
        """Sorted triple (P1 <= P2 <= P3) at q; q must lie in the span."""
        for i in self.window_index_range():
            w = self.window(i)
            if w.q_lo <= q <= w.q_hi:
                return tuple(sorted(f.value(q) for f in w.funcs))
        raise ValueError(f"q = {q} outside the covered span {self.span}")

    # -- special abscissas --------------------------------------------------
    def d_k(self, k: int):
        return self.num(self._d_k[k])

    def breakpoints(self):
        """kind -> list of (k, q) numeric abscissas used by the estimators."""
        out = {"q_t": [], "c_t": [], "c_end": [], "d": [], "a_t": [], "b_t": [],
               "q_t1": []}
        lo, hi = self.span
        for k in range(self.k_lo, self.k_hi):
            tk = self.prog.t(k)
            for kind, expr in (
                ("q_t", self._idx[tk].q),
                ("c_t", self._idx[tk].c),
                ("c_end", self._idx[self.prog.t(k + 1) - 1].c),
                ("a_t", self._idx[tk].a),
                ("b_t", self._idx[tk].b),
                ("q_t1", self._idx[tk + 1].q if tk + 1 in self._idx else None),
            ):
                if expr is None:
                    continue
                q = self.num(expr)
                if lo <= q <= hi:
                    out[kind].append((k, q))
            q = self.d_k(k)
            if lo <= q <= hi:
                out["d"].append((k, q))
        return out

    def gray_intervals(self):
        """I'_{i+1} = [b_i, a_{i+1}] for consecutive indices in range."""
        out = []
        items = sorted(self._idx)
        for i in items[:-1]:
            if i + 1 in self._idx:
                b = self.num(self._idx[i].b)
                a = self.num(self._idx[i + 1].a)
                if a >= b:
                    out.append((i + 1, b, a))
        return out

    def in_gray(self, q, margin=0.0) -> bool:
        return any(b - margin <= q <= a + margin for _, b, a in self.gray_intervals())

    def I_intervals(self):
        """I_i = [a_i, b_i] (where the top component of P is -hatL*_i)."""
        out = []
        for i in sorted(self._idx):
            a, b = self.num(self._idx[i].a), self.num(self._idx[i].b)
            if b >= a:
                out.append((i, a, b))
        return out

    # -- exact checks -------------------------------------------------------
    def sum_rule_exact(self, k: int) -> bool:
        """P1+P2+P3 = q at q = q_{t_k}, symbolically in the anchor basis with
        delta kept as a symbol."""
        tk = self.prog.t(k)
        d = self._idx[tk]
        # P components at q_{t_k}: hatL_{t_{k+1}} = logZ_{t_{k+1}};
        # -hatL*_{t_k} = -logEstar; hatL_{t_k} = logZ_{t_k} (kink point)
        total = self._idx[self.prog.t(k + 1)].logZ + d.logEstar.scale(-1) + d.logZ
        return total == d.q

    def key_values_exact(self, i: int) -> bool:
        """hatL_i(c_i) = log Z-hat_{psi_inv(i)} and -hatL*_i(q_i) = (1-delta) log Y-hat_i,
        symbolically."""
        d = self._idx[i]
        j = self.prog.psi_inv(i)
        ok = True
        if j in self._idx:
            # c_i > q_i so hatL_i(c_i) = logE_i + c_i; compare with logZ_j
            ok &= (d.logE + d.c) == self._idx[j].logZ
        ok &= d.logEstar.scale(-1) == d.logY.mul_delta_poly({0: 1, 1: -1})
        return ok


def predicted_system(bundle: Bundle, k_range, delta=None, k0=None,
                     prec: int = DEFAULT_PRECISION) -> SystemBreakpoints:
    return SystemBreakpoints(bundle, k_range, delta=delta, k0=k0, prec=prec)


# ---------------------------------------------------------------------------
# validity checking
# ---------------------------------------------------------------------------

@dataclass
class ValidityReport:
    ordering_ok: bool        # 0 <= P1 <= P2 <= P3 (condition 1, with sum rule)
    sum_ok: bool             # P1+P2+P3 = q within tol
    slope_ok: bool           # slopes in {0,1}, exactly one slope-1 per piece
    kink_ok: bool            # condition 3 at non-smooth points (r < s case)
    continuity_ok: bool
    shape_ok: bool           # expected combinatorial shape of the hat-functions
    shape_failures: list
    failures: list
    tol: float

    @property
    def def_conditions_ok(self) -> bool:
        return (self.ordering_ok and self.sum_ok and self.slope_ok
                and self.kink_ok and self.continuity_ok)

    @property
    def valid(self) -> bool:
        return self.def_conditions_ok and self.shape_ok


def _crossings(funcs, q_lo, q_hi):
    """Abscissas in (q_lo, q_hi) where two of the (piecewise) functions cross."""
    pts = set()
    kinks = sorted(set(k for f in funcs for k in f.kinks_in(q_lo, q_hi)))
    grid = [q_lo] + kinks + [q_hi]
    for a, b in zip(grid, grid[1:]):
        mid = (a + b) / 2
        for m in range(3):
            for n in range(m + 1, 3):
                f, g = funcs[m], funcs[n]
                fa = f.value(mid) - g.value(mid)
                sf = f.slope(mid) - g.slope(mid)
                if sf != 0:
                    qx = mid - fa / sf
                    if a < qx < b:
                        pts.add(qx)
    pts.update(kinks)
    return sorted(pts)


def validate_3system(P, q_span=None, tol: float = 1e-9) -> ValidityReport:
    """Check the defining conditions of a 3-system on the covered span, plus
    (for predicted systems) the expected combinatorial shape of the three
    hat-functions; P must provide .pieces(q_span) -> [Window]."""
    windows = P.pieces(q_span)
    tol_m = mpmath.mpf(tol)
    failures = []
    ordering_ok = sum_ok = slope_ok = kink_ok = continuity_ok = True
    prev_vals = None
    prev_slope_rank = None

    for w in windows:
        funcs = w.funcs
        nodes = [w.q_lo] + _crossings(funcs, w.q_lo, w.q_hi) + [w.q_hi]
        for a, b in zip(nodes, nodes[1:]):
            mid = (a + b) / 2
            vals = sorted((f.value(mid), f.slope(mid)) for f in funcs)
            if vals[0][0] < -tol_m:
                ordering_ok = False
                failures.append(("nonneg", float(mid), float(vals[0][0])))
            s = sum(v for v, _ in vals)
            if abs(s - mid) > tol_m * max(1, abs(mid)):
                sum_ok = False
                failures.append(("sum", float(mid), float(s - mid)))
            slopes = [sl for _, sl in vals]
            if sorted(slopes) != [0, 0, 1]:
                slope_ok = False
                failures.append(("slopes", float(mid), slopes))
        # condition 3 + continuity at interior nodes
        for qx in nodes[1:-1]:
            eps = max(mpmath.mpf(1e-12), (w.q_hi - w.q_lo) * mpmath.mpf(1e-9))
            lv = sorted((f.value(qx - eps) + f.slope(qx - eps) * eps * 0, f.slope(qx - eps))
                        for f in funcs)
            rv = sorted((f.value(qx + eps), f.slope(qx + eps)) for f in funcs)
            lvals = sorted(f.value(qx) for f in funcs)
            r = next(j for j, (_, sl) in enumerate(lv) if sl == 1) if any(
                sl == 1 for _, sl in lv) else None
            s = next(j for j, (_, sl) in enumerate(rv) if sl == 1) if any(
                sl == 1 for _, sl in rv) else None
            if r is not None and s is not None and r < s:
                band = lvals[r:s + 1]
                if max(band) - min(band) > tol_m * max(1, abs(qx)):
                    kink_ok = False
                    failures.append(("kink", float(qx), r, s,
                                     float(max(band) - min(band))))
        # continuity / condition 3 across window boundary
        vals_lo = sorted(f.value(w.q_lo) for f in funcs)
        slope_lo = sorted((f.value(w.q_lo), f.slope(w.q_lo)) for f in funcs)
        s_rank = next((j for j, (_, sl) in enumerate(slope_lo) if sl == 1), None)
        if prev_vals is not None:
            if any(abs(x - y) > tol_m * max(1, abs(w.q_lo))
                   for x, y in zip(prev_vals, vals_lo)):
                continuity_ok = False
                failures.append(("continuity", float(w.q_lo)))
            r, s = prev_slope_rank, s_rank
            if r is not None and s is not None and r < s:
                band = vals_lo[r:s + 1]
                if max(band) - min(band) > tol_m * max(1, abs(w.q_lo)):
                    kink_ok = False
                    failures.append(("kink-boundary", float(w.q_lo), r, s))
        prev_vals = sorted(f.value(w.q_hi) for f in funcs)
        prev_slope_rank = next(
            (j for j, (_, sl) in enumerate(
                sorted((f.value(w.q_hi - mpmath.mpf(1e-9)), f.slope(w.q_hi - mpmath.mpf(1e-9)))
                       for f in funcs)) if sl == 1), None)

    shape_ok, shape_failures = True, []
    if isinstance(P, SystemBreakpoints):
        shape_ok, shape_failures = _shape_checks(P, tol_m)

    return ValidityReport(
        ordering_ok=ordering_ok, sum_ok=sum_ok, slope_ok=slope_ok,
        kink_ok=kink_ok, continuity_ok=continuity_ok, shape_ok=shape_ok,
        shape_failures=shape_failures, failures=failures, tol=tol,
    )


def _shape_checks(P: SystemBreakpoints, tol):
    """Expected combinatorics of the hat-functions on each window: the flat
    level of -hatL* must clear both hatL levels where the construction places
    it on top, and the clearance must not shrink along the window."""
    fails = []
    gaps = []
    for i in P.window_index_range():
        w = P.window(i)
        k = w.meta["k"]
        top, mid_f, low = w.funcs  # hatL_{t_{k+1}}, -hatL*_{i+1}, hatL_{i+1}
        d1 = P.data(i + 1)
        q_next = P.num(d1.q)
        # at its own kink, -hatL*_{i+1} must dominate hatL_{i+1}
        if mid_f.value(q_next) < low.value(q_next) - tol:
            fails.append(("mid_below_low_at_q", i + 1,
                          float(mid_f.value(q_next) - low.value(q_next))))
        # boundary window (i+1 = t_k): at the window's left end the rising
        # branch of -hatL*_{t_k} must already clear the flat level of hatL_{t_k}
        if i + 1 == P.prog.t(k):
            if mid_f.value(w.q_lo) < low.value(w.q_lo) - tol:
                fails.append(("boundary_mid_below", i + 1,
                              float(mid_f.value(w.q_lo) - low.value(w.q_lo))))
            # log Z-hat_{t_k} <= (1-delta) log Y-hat_{t_k}: the flat middle level
            # must be reachable from below by the bottom component
            lhs = P.num(d1.logZ)
            rhs = -P.num(d1.logEstar)
            if lhs > rhs + tol:
                fails.append(("level_order", i + 1, float(lhs - rhs)))
        # I_{i+1} = [a_{i+1}, b_{i+1}] must be a nonempty subinterval
        a_v, b_v = P.num(d1.a), P.num(d1.b)
        if b_v < a_v - tol:
            fails.append(("I_empty", i + 1, float(b_v - a_v)))
        if a_v < w.q_lo - tol or b_v > w.q_hi + tol:
            fails.append(("I_outside_window", i + 1))
        g = mid_f.value(q_next) - max(top.value(q_next), low.value(q_next))
        gaps.append(g)
        if g < -tol:
            fails.append(("gap_negative", i + 1, float(g)))
    if len(gaps) >= 2 and gaps[-1] < gaps[0] - tol:
        fails.append(("gap_shrinking", float(gaps[0]), float(gaps[-1])))
    return (not fails), fails


# ---------------------------------------------------------------------------
# trajectories and minima
# ---------------------------------------------------------------------------

def _vec_mpf(x):
    return (mpmath.mpf(x.x0), mpmath.mpf(x.x1), mpmath.mpf(x.x2))


def _dot_u_mpf(x, u):
    return mpmath.mpf(x.x0) * u[0] + mpmath.mpf(x.x1) * u[1] + mpmath.mpf(x.x2) * u[2]


def _log_norm(x, u=None):
    """(log|x|, log|x.u|, log|x^u|) at current mpmath precision."""
    fx = _vec_mpf(x)
    ln = mpmath.log(mpmath.sqrt(fx[0] ** 2 + fx[1] ** 2 + fx[2] ** 2))
    if u is None:
        return ln, None, None
    dot = fx[0] * u[0] + fx[1] * u[1] + fx[2] * u[2]
    w0 = fx[1] * u[2] - fx[2] * u[1]
    w1 = fx[2] * u[0] - fx[0] * u[2]
    w2 = fx[0] * u[1] - fx[1] * u[0]
    wn = mpmath.sqrt(w0 * w0 + w1 * w1 + w2 * w2)
    ldot = mpmath.log(abs(dot)) if dot != 0 else mpmath.mpf("-inf")
    lw = mpmath.log(wn) if wn != 0 else mpmath.mpf("-inf")
    return ln, ldot, lw


def traj_eval(x: SymVec, u, q, prec: int = DEFAULT_PRECISION):
    """(L_x(q), L*_x(q)) for a nonzero integer point."""
    if x.is_zero():
        raise ZeroObject("trajectory of the zero point")
    with mpmath.workprec(prec):
        q = mpmath.mpf(q) if not isinstance(q, mpmath.mpf) else q
        ln, ldot, lw = _log_norm(x, u)
        return max(ln, ldot + q), max(lw, ln - q)


@dataclass
class MinimaSample:
    q: object
    L: tuple
    Lstar: Optional[tuple]
    method: str
    points: list
    dual_points: list = field(default_factory=list)
    gray: Optional[bool] = None
    kind: Optional[str] = None
    k: Optional[int] = None
    notes: dict = field(default_factory=dict)


def _greedy_triple(pts, lams):
    """Indices of the three smallest-lam linearly independent points."""
    order = sorted(range(len(lams)), key=lambda i: lams[i])
    chosen = []
    for idx in order:
        p = pts[idx]
        if not chosen:
            chosen.append(idx)
        elif len(chosen) == 1:
            a = pts[chosen[0]]
            if not a.wedge(p).is_zero():
                chosen.append(idx)
        else:
            a, b = pts[chosen[0]], pts[chosen[1]]
            if det3(a, b, p) != 0:
                chosen.append(idx)
        if len(chosen) == 3:
            return chosen
    return None


class CandidateBuilder:
    """Candidate lattice points for the minima at a given q: the y_i, the
    primitive integer points in the z_j directions, the unit vectors, wedges
    of leading candidates, and plane-completion points for the third minimum."""

    def __init__(self, bundle: Bundle, prec: int = DEFAULT_PRECISION):
        self.bundle = bundle
        self.base_prec = prec
        self._u_cache = {}
        self._zhat = {}

    def prec_for(self, q) -> int:
        return max(self.base_prec, int(3.3 * float(q)) + 192)

    def u(self, prec):
        from .xi import xi_value

        key = prec
        if key not in self._u_cache:
            self._u_cache[key] = xi_value(self.bundle, prec).u_vector(prec)
        return self._u_cache[key]

    def u_float(self):
        u = self.u(self.prec_for(64))
        return float(u[1]), float(u[2])

    def _zhat_at(self, j):
        if j not in self._zhat:
            self._zhat[j] = self.bundle.zs.integerized(j).primitive()
        return self._zhat[j]

    def i_max_for(self, q) -> int:
        """Smallest index whose y-norm comfortably exceeds e^q."""
        need = 0.75 * float(q) / math.log(2) + 8
        i = 2
        while self.bundle.ys.at(i).sup_norm().bit_length() < need:
            i += 1
        return i + 2

    def base_points(self, q):
        pts = [(SymVec(1, 0, 0), "e1"), (SymVec(0, 1, 0), "e2"), (SymVec(0, 0, 1), "e3")]
        for i in range(-2, self.i_max_for(q) + 1):
            pts.append((self.bundle.ys.at(i).primitive(), f"y[{i}]"))
        for j in range(0, self.i_max_for(q) + 1):
            pts.append((self._zhat_at(j), f"z[{j}]"))
        return pts

    def primal(self, q, extra=()):
        """MinimaSample upper bounds from the candidate set at q."""
        prec = self.prec_for(q)
        with mpmath.workprec(prec):
            qm = mpmath.mpf(q) if not isinstance(q, mpmath.mpf) else q
            u = self.u(prec)
            cands = self.base_points(q) + list(extra)
            if not cands:
                raise NoCandidates("empty candidate set")
            seen = {}
            for p, lbl in cands:
                key = p.as_tuple() if p.x0 > 0 or (p.x0 == 0 and (p.x1, p.x2) > (0, 0)) \
                    else (-p).as_tuple()
                if key not in seen:
                    seen[key] = (SymVec(*key), lbl)
            pts = [p for p, _ in seen.values()]
            labels = [l for _, l in seen.values()]
            lams = []
            for p in pts:
                ln, ldot, _ = _log_norm(p, u)
                lams.append(max(ln, ldot + qm))
            triple = _greedy_triple(pts, lams)
            if triple is None:
                raise NoCandidates("candidate set spans less than 3 dimensions")
            e2q = mpmath.exp(2 * qm)

            def B(p, r):  # quadratic form whose sqrt is comparable to lam
                du_p = _dot_u_mpf(p, u)
                du_r = _dot_u_mpf(r, u)
                return mpmath.mpf(p.dot(r)) + e2q * du_p * du_r

            def lam_of(p):
                ln, ldot, _ = _log_norm(p, u)
                return max(ln, ldot + qm)

            triple, pts, labels, lams = self._complete(triple, pts, labels,
                                                       lams, B, lam_of)
            L = tuple(lams[i] for i in triple)
            return MinimaSample(q=qm, L=L, Lstar=None, method="candidate",
                                points=[pts[i] for i in triple],
                                notes={"labels": [labels[i] for i in triple]})

    def dual(self, q, extra=()):
        prec = self.prec_for(q)
        with mpmath.workprec(prec):
            qm = mpmath.mpf(q) if not isinstance(q, mpmath.mpf) else q
            u = self.u(prec)
            cands = self.base_points(q) + list(extra)
            pts = [p for p, _ in cands]
            labels = [l for _, l in cands]
            lams = []
            for p in pts:
                ln, _, lw = _log_norm(p, u)
                lams.append(max(lw, ln - qm))
            triple = _greedy_triple(pts, lams)
            if triple is None:
                raise NoCandidates("candidate set spans less than 3 dimensions")
            e2q = mpmath.exp(-2 * qm)
            usq = u[0] ** 2 + u[1] ** 2 + u[2] ** 2

            def B(p, r):
                # <p^u, r^u> + e^{-2q} <p, r>
                pr = mpmath.mpf(p.dot(r))
                return (pr * usq - _dot_u_mpf(p, u) * _dot_u_mpf(r, u)
                        + e2q * pr)

            def lam_of(p):
                ln, _, lw = _log_norm(p, u)
                return max(lw, ln - qm)

            triple, pts, labels, lams = self._complete(triple, pts, labels,
                                                       lams, B, lam_of)
            L = tuple(lams[i] for i in triple)
            return MinimaSample(q=qm, L=L, Lstar=None, method="candidate",
                                points=[pts[i] for i in triple],
                                notes={"labels": [labels[i] for i in triple]})

    def _complete(self, triple, pts, labels, lams, B, lam_of):
        """Augment the candidate list with plane completions around the current
        best pairs, then redo the greedy selection."""
        for _ in range(2):
            best = list(triple)
            for pair in [(best[0], best[1]), (best[0], best[2]), (best[1], best[2])]:
                for comp in self._completions(pts[pair[0]], pts[pair[1]], B):
                    pts.append(comp)
                    labels.append("comp")
                    lams.append(lam_of(comp))
            new = _greedy_triple(pts, lams)
            if new == triple:
                break
            triple = new
        return triple, pts, labels, lams

    def _completions(self, v1: SymVec, v2: SymVec, B, window: int = 4):
        """Integer points x with x . n = 1 (n the primitive normal of the
        v1-v2 plane, so x sits one layer off it), locally minimized around the
        least-squares center of the quadratic form B."""
        n = v1.wedge(v2)
        if n.is_zero():
            return []
        n = n.primitive()
        x0 = _solve_dot_one(n)
        if x0 is None:
            return []
        a11, a22, a12 = B(v1, v1), B(v2, v2), B(v1, v2)
        r1, r2 = -B(x0, v1), -B(x0, v2)
        det = a11 * a22 - a12 * a12
        if det == 0:
            return []
        ac = (r1 * a22 - r2 * a12) / det
        bc = (r2 * a11 - r1 * a12) / det
        try:
            ai, bi = int(mpmath.nint(ac)), int(mpmath.nint(bc))
        except (OverflowError, ValueError):
            return []
        out = []
        for da in range(-window, window + 1):
            for db in range(-window, window + 1):
                p = x0 + (ai + da) * v1 + (bi + db) * v2
                if not p.is_zero():
                    out.append(p)
        return out


def _solve_dot_one(n: SymVec):
    """Integer x with x . n = 1 for a primitive n, via extended gcd."""
    g1, a, b = _ext_gcd(n.x0, n.x1)
    g, c, d = _ext_gcd(g1, n.x2)
    if abs(g) != 1:
        return None
    s = 1 if g == 1 else -1
    return SymVec(s * c * a, s * c * b, s * d)


def _ext_gcd(a, b):
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        qt = old_r // r
        old_r, r = r, old_r - qt * r
        old_s, s = s, old_s - qt * s
        old_t, t = t, old_t - qt * t
    return old_r, old_s, old_t


def minima_candidates(builder: CandidateBuilder, q, P: Optional[SystemBreakpoints] = None,
                      kind=None, k=None) -> MinimaSample:
    sample = builder.primal(q)
    dual = builder.dual(q)
    sample.Lstar = dual.L
    sample.dual_points = dual.points
    sample.kind = kind
    sample.k = k
    if P is not None:
        sample.gray = P.in_gray(float(q))
    return sample


def minima_bruteforce(builder: CandidateBuilder, q, R_max: int = 10 ** 4,
                      safety: float = 2.0, dual_R_max: int = 5 * 10 ** 6) -> MinimaSample:
    """Exact successive minima by exhaustive enumeration; the search radius is
    certified by a candidate-based upper bound on lambda_3(q)."""
    cand = minima_candidates(builder, q)
    prec = builder.prec_for(q)
    with mpmath.workprec(prec):
        qm = mpmath.mpf(q) if not isinstance(q, mpmath.mpf) else q
        u = builder.u(prec)
        cutoff = float(mpmath.exp(cand.L[2])) * (1 + 1e-9)
        R = math.ceil(safety * cutoff)
        if R > R_max:
            raise TooLarge(f"search radius {R} exceeds R_max = {R_max}")
        xi_f, xi2_f = builder.u_float()
        pts, lams = kernels.collect_primal(xi_f, xi2_f, float(qm), R, cutoff)
        spts = [SymVec(int(a), int(b), int(c)) for a, b, c in pts]
        triple = _greedy_triple(spts, list(lams))
        if triple is None:
            raise TooLarge("enumeration returned fewer than 3 independent points")
        chosen = [spts[i] for i in triple]
        L = []
        for p in chosen:
            ln, ldot, _ = _log_norm(p, u)
            L.append(max(ln, ldot + qm))
        # dual side
        cutoff_s = float(mpmath.exp(cand.Lstar[2])) * (1 + 1e-9)
        R0 = math.ceil(cutoff_s * float(mpmath.exp(qm)) * 1.01) + 1
        if R0 > dual_R_max:
            raise TooLarge(f"dual search radius {R0} exceeds {dual_R_max}")
        dpts, dlams = kernels.collect_dual(xi_f, xi2_f, float(qm), R0, cutoff_s)
        sdp = [SymVec(int(a), int(b), int(c)) for a, b, c in dpts]
        dtriple = _greedy_triple(sdp, list(dlams))
        dchosen = [sdp[i] for i in dtriple]
        Ls = []
        for p in dchosen:
            ln, _, lw = _log_norm(p, u)
            Ls.append(max(lw, ln - qm))
        return MinimaSample(q=qm, L=tuple(L), Lstar=tuple(Ls), method="bruteforce",
                            points=chosen, dual_points=dchosen,
                            notes={"R": R, "R0": R0})


# ---------------------------------------------------------------------------
# duality / comparison
# ---------------------------------------------------------------------------

@dataclass
class DualityReport:
    per_j: dict            # j -> max |L_j + L*_{4-j}| over the grid
    per_j_windows: dict    # j -> (early max, late max)
    grid: list

    @property
    def non_growing(self) -> bool:
        return all(late <= 2 * early + 1e-9 for early, late in self.per_j_windows.values())


def duality_check(builder: CandidateBuilder, q_grid) -> DualityReport:
    samples = [minima_bruteforce(builder, q) for q in q_grid]
    per_j = {}
    per_j_windows = {}
    half = (min(q_grid) + max(q_grid)) / 2
    for j in (1, 2, 3):
        devs = [(float(s.q), abs(float(s.L[j - 1] + s.Lstar[3 - j]))) for s in samples]
        per_j[j] = max(d for _, d in devs)
        early = max((d for qv, d in devs if qv <= half), default=0.0)
        late = max((d for qv, d in devs if qv > half), default=0.0)
        per_j_windows[j] = (early, late)
    return DualityReport(per_j=per_j, per_j_windows=per_j_windows, grid=list(q_grid))


@dataclass
class ComparisonReport:
    item1: dict            # window label -> max |L1 - P1|
    item2: dict            # window label -> max over I_j of (|L2-P2|, |L3-P3|)
    item3_C: float         # smallest C with P2 - C <= L2 <= L3 <= P3 + C on I'
    rows: list             # (q, L1..3, P1..3, gray)

    def non_growing(self, early: str, late: str, factor: float = 2.0) -> dict:
        out = {}
        out["item1"] = self.item1[late] <= factor * self.item1[early] + 1e-9
        out["item2"] = all(
            l <= factor * e + 1e-9
            for e, l in zip(self.item2[early], self.item2[late]))
        return out


def compare(P: SystemBreakpoints, samples, window_of=None) -> ComparisonReport:
    """window_of: sample -> label ('early'/'late'); defaults to splitting the
    q-range in half (by the midpoint of log scale)."""
    qs = [float(s.q) for s in samples]
    half = (min(qs) + max(qs)) / 2
    if window_of is None:
        def window_of(s):
            return "early" if float(s.q) <= half else "late"
    item1 = {}
    item2 = {}
    C = 0.0
    rows = []
    I = P.I_intervals()

    def in_I(qv):
        return any(a <= qv <= b for _, a, b in I)

    for s in samples:
        qv = float(s.q)
        Pv = P.P(s.q)
        gray = P.in_gray(qv)
        rows.append((qv, *[float(x) for x in s.L], *[float(x) for x in Pv], gray))
        w = window_of(s)
        d1 = abs(float(s.L[0] - Pv[0]))
        item1[w] = max(item1.get(w, 0.0), d1)
        if in_I(qv) and not gray:
            d2 = abs(float(s.L[1] - Pv[1]))
            d3 = abs(float(s.L[2] - Pv[2]))
            prev = item2.get(w, (0.0, 0.0))
            item2[w] = (max(prev[0], d2), max(prev[1], d3))
        if gray:
            C = max(C, float(Pv[1] - s.L[1]), float(s.L[1] - Pv[2]),
                    float(Pv[1] - s.L[2]), float(s.L[2] - Pv[2]), 0.0)
    for w in item1:
        item2.setdefault(w, (0.0, 0.0))
    return ComparisonReport(item1=item1, item2=item2, item3_C=C, rows=rows)


# ---------------------------------------------------------------------------
# export
# ---------------------------------------------------------------------------

def csv_rows(P: SystemBreakpoints, samples):
    rows = ["q,L1,L2,L3,P1,P2,P3,gray_flag"]
    for s in samples:
        Pv = P.P(s.q)
        gray = P.in_gray(float(s.q))
        rows.append(",".join(
            [mpmath.nstr(mpmath.mpf(s.q), 17)]
            + [mpmath.nstr(mpmath.mpf(v), 17) for v in s.L]
            + [mpmath.nstr(mpmath.mpf(v), 17) for v in Pv]
            + ["1" if gray else "0"]))
    return rows


def svg_plot(P: SystemBreakpoints, samples=(), width=900, height=540, n_grid=400,
             config_note=""):
    """Self-contained SVG of the combined graph: P1..P3 solid polylines,
    samples as dots, gray intervals shaded."""
    lo, hi = (float(x) for x in P.span)
    # keep the grid strictly inside the span: the float endpoints can round
    # just past the exact mpf boundaries
    eps = (hi - lo) * 1e-12
    qs = [min(max(lo + (hi - lo) * t / n_grid, lo + eps), hi - eps)
          for t in range(n_grid + 1)]
    curves = [[], [], []]
    for q in qs:
        vals = P.P(mpmath.mpf(q))
        for j in range(3):
            curves[j].append(float(vals[j]))
    ymax = max(curves[2]) * 1.05 + 1e-9
    pad = 50

    def X(q):
        return pad + (q - lo) / (hi - lo) * (width - 2 * pad)

    def Y(v):
        return height - pad - v / ymax * (height - 2 * pad)

    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">',
             f"<desc>{config_note}</desc>",
             f'<rect width="{width}" height="{height}" fill="white"/>']
    for _, b, a in P.gray_intervals():
        b, a = float(b), float(a)
        if a > b and a >= lo and b <= hi:
            parts.append(
                f'<rect x="{X(max(b, lo)):.2f}" y="{pad}" '
                f'width="{max(X(min(a, hi)) - X(max(b, lo)), 0.5):.2f}" '
                f'height="{height - 2 * pad}" fill="#cccccc" opacity="0.5"/>')
    parts.append(f'<line x1="{pad}" y1="{height - pad}" x2="{width - pad}" '
                 f'y2="{height - pad}" stroke="black"/>')
    parts.append(f'<line x1="{pad}" y1="{pad}" x2="{pad}" y2="{height - pad}" '
                 'stroke="black"/>')
    colors = ("#1f77b4", "#2ca02c", "#d62728")
    for j, col in enumerate(colors):
        pts = " ".join(f"{X(q):.2f},{Y(v):.2f}" for q, v in zip(qs, curves[j]))
        parts.append(f'<polyline points="{pts}" fill="none" stroke="{col}" '
                     'stroke-width="1.5"/>')
    for s in samples:
        qv = float(s.q)
        if not (lo <= qv <= hi):
            continue
        for j, col in enumerate(colors):
            parts.append(f'<circle cx="{X(qv):.2f}" cy="{Y(float(s.L[j])):.2f}" '
                         f'r="2.5" fill="{col}"/>')
    parts.append(f'<text x="{width - pad}" y="{height - pad + 30}" '
                 'text-anchor="end" font-size="12">q</text>')
    parts.append("</svg>")
    return "\n".join(parts)
