"""Seed construction (families, admissibility solving) and the matrix
recurrence w_{k+1} = w_k^{s_{k+1}} w_{k-1}, with growth / determinant-exponent
diagnostics and the idealized log-norm sequence hat-W.

Norms here are sup norms (max absolute coefficient) unless stated otherwise.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import mpmath

from .exactlin import DEFAULT_PRECISION, IntMat2, J, log_real
from .sturm import SturmianProgram


class BadRoyTriple(ValueError):
    pass


class EqualLetters(ValueError):
    pass


class NoAdmissibleN(ValueError):
    pass


class DegenerateSeed(ValueError):
    pass


class SingularN(ValueError):
    pass


class DegenerateGrowth(ValueError):
    pass


class CapacityError(OverflowError):
    pass


def admissibility_checks(w0: IntMat2, w1: IntMat2, N: IntMat2) -> dict:
    """The three symmetry conditions defining admissibility of N for (w0, w1)."""
    return {
        "w1N_symmetric": (w1 @ N).is_symmetric(),
        "w0Nt_symmetric": (w0 @ N.transpose()).is_symmetric(),
        "w1w0Nt_symmetric": (w1 @ w0 @ N.transpose()).is_symmetric(),
    }


def is_admissible(w0: IntMat2, w1: IntMat2, N: IntMat2) -> bool:
    return N.det() != 0 and all(admissibility_checks(w0, w1, N).values())


@dataclass(frozen=True)
class MatrixSeed:
    w0: IntMat2
    w1: IntMat2
    N: IntMat2
    family: str
    params: tuple
    extras: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.w0.det() == 0 or self.w1.det() == 0:
            raise DegenerateSeed("w0 and w1 must be invertible")
        checks = admissibility_checks(self.w0, self.w1, self.N)
        if not all(checks.values()):
            raise DegenerateSeed(f"N fails admissibility: {checks}")
        if self.N.det() == 0:
            raise SingularN("admissible N has determinant 0")

    @property
    def det_N(self) -> int:
        return self.N.det()

    @property
    def tr_JN(self) -> int:
        return (J @ self.N).trace()

    def N_parity(self, k: int) -> IntMat2:
        """N_k = N for even k, N^T for odd k."""
        return self.N if k % 2 == 0 else self.N.transpose()


def solve_admissibility(w0: IntMat2, w1: IntMat2) -> IntMat2:
    """Solve the three linear symmetry conditions for N.

    Expects a 1-dimensional solution space; returns the primitive integer
    generator whose first nonzero entry (row-major) is positive.
    """
    if w0.det() == 0 or w1.det() == 0:
        raise DegenerateSeed("w0 and w1 must be invertible")

    def sym_row_MN(m: IntMat2):
        # (M N)_{12} - (M N)_{21} = 0 as coefficients on (n11, n12, n21, n22)
        return [-m.c, m.a, -m.d, m.b]

    def sym_row_MNt(m: IntMat2):
        # (M N^T)_{12} - (M N^T)_{21} = 0
        return [-m.c, -m.d, m.a, m.b]

    rows = [
        [Fraction(v) for v in sym_row_MN(w1)],
        [Fraction(v) for v in sym_row_MNt(w0)],
        [Fraction(v) for v in sym_row_MNt(w1 @ w0)],
    ]
    # Gaussian elimination to row echelon form
    pivots = []
    r = 0
    for col in range(4):
        piv = next((i for i in range(r, len(rows)) if rows[i][col] != 0), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = 1 / rows[r][col]
        rows[r] = [v * inv for v in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][col] != 0:
                f = rows[i][col]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        pivots.append(col)
        r += 1
        if r == len(rows):
            break
    free = [c for c in range(4) if c not in pivots]
    if len(free) == 0:
        raise NoAdmissibleN("symmetry conditions force N = 0")
    if len(free) > 1:
        raise DegenerateSeed(f"solution space has dimension {len(free)} > 1")
    fc = free[0]
    sol = [Fraction(0)] * 4
    sol[fc] = Fraction(1)
    for ridx, col in enumerate(pivots):
        sol[col] = -rows[ridx][fc]
    # clear denominators, make primitive, normalize sign
    from math import gcd, lcm

    den = lcm(*(f.denominator for f in sol))
    ints = [int(f * den) for f in sol]
    g = 0
    for v in ints:
        g = gcd(g, abs(v))
    ints = [v // g for v in ints]
    lead = next(v for v in ints if v != 0)
    if lead < 0:
        ints = [-v for v in ints]
    N = IntMat2(*ints)
    if N.det() == 0:
        raise SingularN(f"solved N = {N} is singular")
    return N


# ---------------------------------------------------------------------------
# families
# ---------------------------------------------------------------------------

def roy_family(a: int, b: int, c: int) -> MatrixSeed:
    """Seed w0 = [[1,b],[a,a(b+1)]], w1 = [[1,c],[a,a(c+1)]] with a >= 2, c >= b >= 1."""
    if not (a >= 2 and b >= 1 and c >= b):
        raise BadRoyTriple(f"need a >= 2 and c >= b >= 1, got (a,b,c)=({a},{b},{c})")
    w0 = IntMat2(1, b, a, a * (b + 1))
    w1 = IntMat2(1, c, a, a * (c + 1))
    Nt = IntMat2(-1 + a * (b + 1) * (c + 1), -a * (b + 1), -a * (c + 1), a)
    N = Nt.transpose()
    seed = MatrixSeed(w0, w1, N, family="roy", params=(a, b, c),
                      extras={"proper_capable": b != c})
    assert seed.tr_JN == a * (b - c)
    return seed


def bl_family(a: int, b: int, s1_prime: int = 1) -> MatrixSeed:
    """Unimodular seed from two letters: w0 = B, w1 = B^{s1'-1} A with
    A = [[a,1],[1,0]], B = [[b,1],[1,0]]; requires a != b."""
    if a == b:
        raise EqualLetters(f"need a != b, got a = b = {a}")
    if a < 1 or b < 1 or s1_prime < 1:
        raise DegenerateSeed("need a, b, s1' >= 1")
    A = IntMat2(a, 1, 1, 0)
    B = IntMat2(b, 1, 1, 0)
    w0 = B
    w1 = (B ** (s1_prime - 1)) @ A
    N = solve_admissibility(w0, w1)
    # the closed-form candidate (A B)^{-1}; det(AB) = 1 so the adjugate is the
    # inverse — record whether it actually passes the symmetry checks
    cand = (A @ B).adj()
    extras = {
        "proper_capable": True,
        "s1_prime": s1_prime,
        "closed_form_N": cand,
        "closed_form_N_admissible": is_admissible(w0, w1, cand),
    }
    return MatrixSeed(w0, w1, N, family="bl", params=(a, b, s1_prime), extras=extras)


# ---------------------------------------------------------------------------
# recurrence
# ---------------------------------------------------------------------------

class MatrixSequence:
    """w_{k+1} = w_k^{s_{k+1}} w_{k-1}, with a memoized power ladder
    w_k^l w_{k-1} for 0 <= l <= s_{k+1} + 1 (k >= 1)."""

    def __init__(self, seed: MatrixSeed, prog: SturmianProgram, max_bits: Optional[int] = None):
        self.seed = seed
        self.prog = prog
        self.max_bits = max_bits
        self._w = [seed.w0, seed.w1]
        self._ladder = {}

    def w(self, k: int) -> IntMat2:
        if k < 0:
            raise ValueError("w_k defined for k >= 0")
        while len(self._w) <= k:
            j = len(self._w) - 1          # highest built index
            self._w.append(self.ladder(j, self.prog.s(j + 1)))
        return self._w[k]

    def ladder(self, k: int, l: int) -> IntMat2:
        """w_k^l w_{k-1} for k >= 1, 0 <= l <= s_{k+1} + 1."""
        if k < 1:
            raise ValueError("power ladder defined for k >= 1")
        if not (0 <= l <= self.prog.s(k + 1) + 1):
            raise ValueError(f"l = {l} out of range for k = {k} (s_{k+1} = {self.prog.s(k + 1)})")
        key = (k, l)
        if key not in self._ladder:
            if l == 0:
                val = self.w(k - 1)
            else:
                val = self.w(k) @ self.ladder(k, l - 1)
            if self.max_bits is not None and val.sup_norm().bit_length() > self.max_bits:
                raise CapacityError(f"w_{k}^{l} w_{k-1} exceeds {self.max_bits} bits")
            self._ladder[key] = val
        return self._ladder[key]

    def tr(self, k: int) -> int:
        return self.w(k).trace()

    def det(self, k: int) -> int:
        return self.w(k).det()

    def norm(self, k: int) -> int:
        return self.w(k).sup_norm()

    def log_norm(self, k: int, prec: int = DEFAULT_PRECISION):
        return log_real(self.norm(k), prec)

    def is_unimodular(self) -> bool:
        return abs(self.det(0)) == 1 and abs(self.det(1)) == 1


# ---------------------------------------------------------------------------
# growth diagnostics
# ---------------------------------------------------------------------------

def lemma_shape_ok(m: IntMat2) -> bool:
    """Entrywise shape 1 <= a <= min(b, c) <= max(b, c) <= d."""
    return 1 <= m.a <= min(m.b, m.c) <= max(m.b, m.c) <= m.d


@dataclass
class GrowthReport:
    ratios: list            # (k, l, Fraction ||w_k^l w_{k-1}|| / (||w_k|| ||w_k^{l-1} w_{k-1}||))
    ratio_min: Fraction
    ratio_max: Fraction
    shape_ok: bool          # both w0, w1 pass the entrywise shape test
    c1: Optional[int]       # certified constants when shape_ok, else None
    c2: Optional[int]
    k_max: int


def check_mult_growth(seq: MatrixSequence, k_max: int) -> GrowthReport:
    """Ratios ||w_k^l w_{k-1}|| / (||w_k|| ||w_k^{l-1} w_{k-1}||) for
    k = 1..k_max, 1 <= l <= s_{k+1} + 1 (sup norms, exact rationals)."""
    ratios = []
    for k in range(1, k_max + 1):
        nk = seq.norm(k)
        for l in range(1, seq.prog.s(k + 1) + 2):
            num = seq.ladder(k, l).sup_norm()
            den = nk * seq.ladder(k, l - 1).sup_norm()
            ratios.append((k, l, Fraction(num, den)))
    shape_ok = lemma_shape_ok(seq.w(0)) and lemma_shape_ok(seq.w(1))
    vals = [r for _, _, r in ratios]
    return GrowthReport(
        ratios=ratios,
        ratio_min=min(vals),
        ratio_max=max(vals),
        shape_ok=shape_ok,
        c1=1 if shape_ok else None,
        c2=2 if shape_ok else None,
        k_max=k_max,
    )


@dataclass
class DeltaReport:
    deltas: dict            # k -> mpf  (only for k with ||w_k|| > 1)
    delta_hat: object       # mpf: last available delta_k
    increments: dict        # k -> |delta_k - delta_{k-1}| where both defined
    bracket: Optional[tuple]  # certified (alpha, beta) for roy seeds
    exact_zero: bool        # unimodular seeds: delta = 0 exactly
    k_max: int


def delta_estimate(seq: MatrixSequence, k_max: int, prec: int = DEFAULT_PRECISION) -> DeltaReport:
    """delta_k = log|det w_k| / log||w_k|| and, for roy seeds, the certified
    bracket [log a / log(2a(c+1)), log a / log(a(b+1))].

    The bracket comes from the two-sided induction (2||w_k||)^alpha <= |det w_k|
    <= ||w_k||^beta: on the upper side the multiplicativity constant is 1
    (||w_{k+1}|| >= ||w_k|| ||w_{k-1}||), so beta carries no extra factor 2;
    with a factor 2 there the base case k = 0 already fails (a(b+1))^beta < a,
    and empirically delta sits outside such an interval."""
    deltas = {}
    with mpmath.workprec(prec):
        for k in range(k_max + 1):
            n = seq.norm(k)
            if n <= 1:
                continue
            deltas[k] = log_real(abs(seq.det(k)), prec) / log_real(n, prec)
    if not deltas:
        raise DegenerateGrowth("no index with ||w_k|| > 1")
    increments = {}
    keys = sorted(deltas)
    for a, b in zip(keys, keys[1:]):
        if b == a + 1:
            increments[b] = abs(deltas[b] - deltas[a])
    bracket = None
    if seq.seed.family == "roy":
        a, b, c = seq.seed.params
        with mpmath.workprec(prec):
            la = mpmath.log(a)
            bracket = (la / mpmath.log(2 * a * (c + 1)), la / mpmath.log(a * (b + 1)))
    return DeltaReport(
        deltas=deltas,
        delta_hat=deltas[keys[-1]],
        increments=increments,
        bracket=bracket,
        exact_zero=seq.is_unimodular(),
        k_max=k_max,
    )


# ---------------------------------------------------------------------------
# idealized log norms
# ---------------------------------------------------------------------------

class HatW:
    """log W-hat_k: the solution of log W_{k+1} = s_{k+1} log W_k + log W_{k-1}
    anchored at (k0 - 1, k0) with the true log norms; extended downward while
    the extrapolated values stay positive."""

    def __init__(self, seq: MatrixSequence, k0: int = 2, prec: int = DEFAULT_PRECISION):
        if k0 < 1:
            raise ValueError("k0 must be >= 1")
        if seq.norm(k0 - 1) <= 1 or seq.norm(k0) <= 1:
            raise DegenerateGrowth(
                f"anchor norms ||w_{k0 - 1}|| = {seq.norm(k0 - 1)}, ||w_{k0}|| = {seq.norm(k0)} "
                "must both exceed 1; pick a larger k0"
            )
        self.seq = seq
        self.prog = seq.prog
        self.k0 = k0
        self.prec = prec
        with mpmath.workprec(prec):
            self._anchors = (seq.log_norm(k0 - 1, prec), seq.log_norm(k0, prec))
        # integer coefficients: log W_k = A_k * anchor0 + B_k * anchor1
        self._coeffs = {k0 - 1: (1, 0), k0: (0, 1)}
        self._lo = k0 - 1
        self._hi = k0

    def coeffs(self, k: int):
        while self._hi < k:
            j = self._hi
            s = self.prog.s(j + 1)
            a1, b1 = self._coeffs[j]
            a0, b0 = self._coeffs[j - 1]
            self._coeffs[j + 1] = (s * a1 + a0, s * b1 + b0)
            self._hi += 1
        while self._lo > k:
            j = self._lo
            # log W_{j-1} = log W_{j+1} - s_{j+1} log W_j
            s = self.prog.s(j + 1)
            a1, b1 = self._coeffs[j + 1]
            a0, b0 = self._coeffs[j]
            self._coeffs[j - 1] = (a1 - s * a0, b1 - s * b0)
            self._lo -= 1
            if self.log(j - 1) <= 0:
                raise DegenerateGrowth(
                    f"downward extension of log W-hat reaches a non-positive value at k = {j - 1}"
                )
        return self._coeffs[k]

    def log(self, k: int):
        a, b = self.coeffs(k)
        return a * self._anchors[0] + b * self._anchors[1]

    @property
    def anchors(self):
        return self._anchors
