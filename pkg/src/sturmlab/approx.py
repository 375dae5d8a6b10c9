"""The symmetric-matrix sequence y_j, the dual sequence z_j, exact identity
verification, content/divisibility reports, and Fibonacci-case fans of
intermediate lattice points.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd

from .exactlin import IntMat2, RatVec, SymVec, det3, rat_dot, rat_wedge
from .matseq import MatrixSequence


class BadIndex(ValueError):
    pass


class FibonacciOnly(ValueError):
    pass


class YSeq:
    """y_{-2} = w0 N^T, y_{-1} = w1 N, and for k >= 1, 0 <= l <= s_{k+1}:
    y_{t_k + l} = w_k^{l+1} w_{k-1} N_k  (N_k = N for even k, N^T for odd)."""

    def __init__(self, seq: MatrixSequence):
        self.seq = seq
        self.prog = seq.prog
        self.seed = seq.seed
        self._memo = {}

    def mat(self, i: int) -> IntMat2:
        if i in self._memo:
            return self._memo[i]
        if i < -2:
            raise BadIndex(f"y_i defined for i >= -2, got {i}")
        if i == -2:
            m = self.seed.w0 @ self.seed.N.transpose()
        elif i == -1:
            m = self.seed.w1 @ self.seed.N
        else:
            k, l = self.prog.block_of(i)
            m = self.seq.ladder(k, l + 1) @ self.seed.N_parity(k)
        if not m.is_symmetric():
            raise BadIndex(f"y_{i} = {m} is not symmetric (inadmissible seed?)")
        self._memo[i] = m
        return m

    def at(self, i: int) -> SymVec:
        return self.mat(i).sym_vec()

    def det(self, i: int) -> int:
        return self.mat(i).det()

    def content(self, i: int) -> int:
        return self.at(i).content()


class ZSeq:
    """z_{t_k + l} = (1 / det w_k) * (y_{psi(t_{k+1})} wedge y_{t_k + l}),
    exposed for j >= 0; rational vectors in lowest terms."""

    def __init__(self, ys: YSeq):
        self.ys = ys
        self.seq = ys.seq
        self.prog = ys.prog
        self._memo = {}

    def _raw(self, j: int) -> RatVec:
        # includes the k = 0 instance, which only yields j = t_0 = -1
        if j in self._memo:
            return self._memo[j]
        if j == -1:
            k, l = 0, 0
        elif j >= 0:
            k, l = self.prog.block_of(j)
        else:
            raise BadIndex(f"z_j defined for j >= -1, got {j}")
        lead = self.ys.at(self.prog.psi(self.prog.t(k + 1)))
        v = RatVec.make(lead.wedge(self.ys.at(j)), self.seq.det(k))
        self._memo[j] = v
        return v

    def at(self, j: int) -> RatVec:
        if j < 0:
            raise BadIndex(f"z_j exposed for j >= 0, got {j}")
        return self._raw(j)

    def integerized(self, j: int) -> SymVec:
        """det(w_2) * z_j, which is an integer vector for admissible seeds."""
        v = self._raw(j).scale(self.seq.det(2))
        if not v.is_integral():
            raise BadIndex(f"det(w_2) z_{j} is not integral: {v}")
        return v.to_sym()


@dataclass
class Bundle:
    """Convenience aggregate: seed + program + matrix/y/z sequences."""

    seq: MatrixSequence
    ys: YSeq = field(init=False)
    zs: ZSeq = field(init=False)

    def __post_init__(self):
        self.ys = YSeq(self.seq)
        self.zs = ZSeq(self.ys)

    @property
    def seed(self):
        return self.seq.seed

    @property
    def prog(self):
        return self.seq.prog


def make_bundle(seed, prog, max_bits=None) -> Bundle:
    return Bundle(MatrixSequence(seed, prog, max_bits=max_bits))


# ---------------------------------------------------------------------------
# identity verification
# ---------------------------------------------------------------------------

@dataclass
class IdentityReport:
    checks: dict          # name -> number of instances verified
    failures: list        # (name, index-tuple, lhs, rhs)
    i_max: int

    @property
    def ok(self) -> bool:
        return not self.failures

    def summary(self) -> str:
        lines = []
        for name in sorted(self.checks):
            bad = [f for f in self.failures if f[0] == name]
            status = "ok" if not bad else f"FAIL ({len(bad)})"
            lines.append(f"{name:<28} {self.checks[name]:>6} instances  {status}")
        return "\n".join(lines)


def verify_identities(bundle: Bundle, i_max: int) -> IdentityReport:
    """Exact verification of the commutation, recurrence, wedge, determinant
    and coprimality identities for all indices up to i_max."""
    prog, seq, ys, zs = bundle.prog, bundle.seq, bundle.ys, bundle.zs
    seed = bundle.seed
    checks = {}
    failures = []

    def record(name, idx, lhs, rhs):
        checks[name] = checks.get(name, 0) + 1
        if lhs != rhs:
            failures.append((name, idx, lhs, rhs))

    k_hi = prog.block_of(i_max)[0] if i_max >= 0 else 0

    # commutation: w_{k-1} w_k N_{k+1} = w_k w_{k-1} N_k for k >= 1
    for k in range(1, k_hi + 2):
        record("commutation", (k,),
               seq.w(k - 1) @ seq.w(k) @ seed.N_parity(k + 1),
               seq.w(k) @ seq.w(k - 1) @ seed.N_parity(k))

    # block power form: y_{t_k + l} = w_k^{l+1} y_{psi(t_k)}  (k >= 1, 0 <= l <= s_{k+1})
    for k in range(1, k_hi + 1):
        base = ys.mat(prog.psi(prog.t(k)))
        for l in range(prog.s(k + 1) + 1):
            i = prog.t(k) + l
            if i > i_max:
                break
            record("block_power", (k, l), ys.mat(i), (seq.w(k) ** (l + 1)) @ base)

    # one-step / psi-step matrix factorizations
    for j in range(-1, i_max):
        k = prog.block_of(j)[0] if j >= 0 else 0
        record("step", (j,), ys.mat(j + 1), seq.w(k) @ ys.mat(j))
    for j in range(0, i_max + 1):
        k = prog.block_of(j)[0]
        if k >= 1:
            record("psi_step", (j,), ys.mat(j), seq.w(k) @ ys.mat(prog.psi(j)))

    # palindromic square step: det(y_psi(j)) y_{j+1} = y_j adj(y_psi(j)) y_j
    for j in range(0, i_max):
        yp = ys.mat(prog.psi(j))
        record("square_step", (j,), yp.det() * ys.mat(j + 1), ys.mat(j) @ yp.adj() @ ys.mat(j))

    # trace recurrence + congruence on the power ladder
    for k in range(1, k_hi + 1):
        tk, dk = seq.tr(k), seq.det(k)
        for l in range(2, prog.s(k + 1) + 2):
            record("trace_recurrence", (k, l),
                   seq.ladder(k, l).trace(),
                   tk * seq.ladder(k, l - 1).trace() - dk * seq.ladder(k, l - 2).trace())
            record("trace_congruence", (k, l),
                   (seq.ladder(k, l).trace() - tk ** (l - 1) * seq.ladder(k, 1).trace()) % abs(dk),
                   0)

    # (a) three-term recurrence inside a block: k >= 1, 0 <= l < s_{k+1}
    for k in range(1, k_hi + 1):
        tk, dk = seq.tr(k), seq.det(k)
        for l in range(prog.s(k + 1)):
            i = prog.t(k) + l
            if i + 1 > i_max:
                break
            record("y_recurrence_block", (k, l),
                   ys.at(i + 1),
                   tk * ys.at(i) - dk * ys.at(prog.psi(i)))

    # (a') recurrence across a block boundary: k >= 2
    for k in range(2, k_hi + 2):
        i = prog.t(k)
        if i > i_max:
            break
        record("y_recurrence_boundary", (k,),
               ys.at(i),
               seq.tr(k - 1) * ys.at(i - 1) - seq.det(k - 1) * ys.at(prog.psi(i - 1)))

    # (b) z recurrences
    for k in range(1, k_hi + 1):
        lead = ys.at(prog.psi(prog.t(k + 1)))
        for l in range(prog.s(k + 1) - 1):
            i = prog.t(k) + l
            if i + 1 > i_max:
                break
            record("z_recurrence_block", (k, l),
                   zs.at(i + 1),
                   zs.at(i).scale(seq.tr(k)) - RatVec.from_sym(
                       lead.wedge(ys.at(prog.psi(i)))))
    for k in range(2, k_hi + 1):
        i = prog.t(k + 1)
        if i <= i_max:
            record("z_recurrence_boundary", (k,),
                   zs.at(i),
                   zs.at(prog.t(k) - 1).scale(seq.tr(k - 1)) - RatVec.from_sym(
                       ys.at(prog.psi(prog.t(k))).wedge(ys.at(prog.psi(prog.t(k) - 1)))))

    # (c) determinant of consecutive triples at block starts: k >= 0
    for k in range(0, k_hi + 1):
        i = prog.t(k)
        if i + 1 > i_max:
            break
        record("det3_triple", (k,),
               det3(ys.at(i - 1), ys.at(i), ys.at(i + 1)),
               -seq.det(k) * ys.det(i) * seed.N_parity(k + 1).tr_J())

    # (d) dual wedge identity: k >= 0, 0 <= l < s_{k+1}
    for k in range(0, k_hi + 1):
        zlead = zs._raw(prog.t(k + 1))
        for l in range(prog.s(k + 1)):
            i = prog.t(k) + l
            if i > i_max or prog.t(k + 1) > i_max + 1:
                break
            record("z_wedge", (k, l),
                   rat_wedge(zlead, zs._raw(i)),
                   RatVec.from_sym(ys.at(i)).scale(
                       seed.det_N * seed.N_parity(k + 1).tr_J()))

    # (e) consecutive y wedge powers: k >= 1, 0 <= l < s_{k+1}
    for k in range(1, k_hi + 1):
        base = ys.at(prog.psi(prog.t(k))).wedge(ys.at(prog.t(k)))
        for l in range(prog.s(k + 1)):
            i = prog.t(k) + l
            if i + 1 > i_max:
                break
            record("y_wedge_power", (k, l),
                   ys.at(i).wedge(ys.at(i + 1)),
                   seq.det(k) ** (l + 1) * base)

    # coprimality package (only when its hypotheses hold)
    hyp = gcd(seq.tr(1), abs(seq.det(1))) == 1 and all(
        gcd(seq.ladder(1, l).trace(), abs(seq.ladder(1, l).det())) == 1
        for l in range(prog.s(2) + 2))
    checks["coprimality_hypothesis"] = 1
    if hyp:
        for k in range(1, k_hi + 1):
            for l in range(prog.s(k + 1) + 2):
                m = seq.ladder(k, l)
                record("ladder_coprime", (k, l), gcd(m.trace(), abs(m.det())), 1)
                record("ladder_primitive", (k, l), m.content(), 1)
        dN = abs(seed.det_N)
        for j in range(-2, i_max + 1):
            record("y_content_divides_detN", (j,), dN % ys.content(j), 0)
    return IdentityReport(checks=checks, failures=failures, i_max=i_max)


# ---------------------------------------------------------------------------
# contents
# ---------------------------------------------------------------------------

@dataclass
class ContentsReport:
    y_contents: dict        # i -> content(y_i)
    y_divides_detN: bool
    z_integral: bool        # det(w_2) z_j integral for all tested j
    z_contents: dict        # j -> content(det(w_2) z_j)
    z_divides_bound: bool   # contents divide det(w2)^2 det(N)^2 |Tr(JN)| (when nonzero)
    content_bound: int      # |det(w2)^2 det(N)^2 Tr(JN)|
    i_max: int


def contents_report(bundle: Bundle, i_max: int) -> ContentsReport:
    seq, ys, zs, seed = bundle.seq, bundle.ys, bundle.zs, bundle.seed
    dN = abs(seed.det_N)
    y_contents = {i: ys.content(i) for i in range(-2, i_max + 1)}
    y_div = all(dN % c == 0 for c in y_contents.values())
    bound = seq.det(2) ** 2 * seed.det_N ** 2 * abs(seed.tr_JN)
    z_contents = {}
    z_integral = True
    z_div = True
    for j in range(0, i_max + 1):
        try:
            v = zs.integerized(j)
        except BadIndex:
            z_integral = False
            continue
        c = v.content()
        z_contents[j] = c
        if bound == 0 or bound % c != 0:
            z_div = False
    return ContentsReport(
        y_contents=y_contents,
        y_divides_detN=y_div,
        z_integral=z_integral,
        z_contents=z_contents,
        z_divides_bound=z_div,
        content_bound=abs(bound),
        i_max=i_max,
    )


# ---------------------------------------------------------------------------
# fans of intermediate points (Fibonacci programs)
# ---------------------------------------------------------------------------

@dataclass
class GrayFan:
    i: int
    quotients: list         # partial quotients of tr(w_{i+1}) / det(w_{i+1})
    convergents: list       # (p_m, q_m) for m = -1 .. r
    points: list            # x_m as SymVec, m = -1 .. r
    contents: list          # content(x_m)
    alpha_beta: list        # (alpha_m, beta_m) integer decomposition data
    endpoints_ok: bool      # x_{-1} = y_i and x_r = y_{i+1}
    recurrence_ok: bool
    wedge_ok: bool          # x_m wedge x_{m+1} = +- d_i z_{i+1}
    content_pairs_ok: bool  # c_m c_{m+1} | d_i (as stated; can fail, see below)
    content_pairs_relaxed_ok: bool  # c_m c_{m+1} | content(d_i z_{i+1}) (what the
    # wedge identity actually gives: content(x_m ^ x_{m+1}) = content(d_i z_{i+1}),
    # which exceeds |d_i| when z_{i+1} is not primitive)
    content_gcd_ok: bool    # gcd(c_m, c_{m+1}) | content(y_i)
    decomposition_ok: bool  # d_{i+2} x_m = alpha_m y_i + beta_m y_{i+1}
    reduced_endpoint: bool  # gcd(tr, det) = 1 so the last convergent is (tr, det)

    @property
    def ok(self) -> bool:
        return (self.endpoints_ok and self.recurrence_ok and self.wedge_ok
                and self.content_pairs_ok and self.content_gcd_ok
                and self.decomposition_ok)


def gray_fan(bundle: Bundle, i: int) -> GrayFan:
    """The fan of lattice points between y_i and y_{i+1} obtained from the
    continued fraction of tr(w_{i+1}) / det(w_{i+1}); only meaningful when the
    program is all-ones (t_k = k - 1, three-term recurrence with step -2)."""
    prog, seq, ys, zs = bundle.prog, bundle.seq, bundle.ys, bundle.zs
    if not prog.is_fibonacci:
        raise FibonacciOnly("fans require the all-ones program")
    if i < 2:
        raise BadIndex(f"fan needs i >= 2, got {i}")
    t_next, d_next = seq.tr(i + 1), seq.det(i + 1)
    d_i = seq.det(i)
    if d_next <= 0:
        raise BadIndex(f"det w_{i + 1} = {d_next} must be positive for the fan")
    # continued fraction of t_next / d_next
    quotients = []
    num, den = t_next, d_next
    while den:
        quotients.append(num // den)
        num, den = den, num - (num // den) * den
    reduced = gcd(t_next, d_next) == 1
    # convergents p_m / q_m, m = -1 .. r
    conv = [(1, 0)]
    p_prev, q_prev = 0, 1
    for a in quotients:
        p, q = conv[-1]
        conv.append((a * p + p_prev, a * q + q_prev))
        p_prev, q_prev = p, q
    yi, yi1 = ys.at(i), ys.at(i + 1)
    yim2 = ys.at(i - 2)
    points = [p * yi - q * yim2 for p, q in conv]
    endpoints_ok = points[0] == yi and (not reduced or points[-1] == yi1)
    # x_0 = a_0 x_{-1} - y_{i-2}, then x_{m+1} = a_{m+1} x_m + x_{m-1}
    recurrence_ok = points[1] == quotients[0] * points[0] - yim2 and all(
        points[m] == quotients[m - 1] * points[m - 1] + points[m - 2]
        for m in range(2, len(points)))
    # wedge invariant: x_m wedge x_{m+1} = +- d_i z_{i+1}
    z_next = zs.at(i + 1).scale(d_i)
    wedge_ok = True
    for m in range(len(points) - 1):
        w = rat_wedge(points[m], points[m + 1])
        if not (w == z_next or w == -z_next):
            wedge_ok = False
    contents = [v.content() for v in points]
    cy = ys.content(i)
    content_pairs_ok = all(abs(d_i) % (contents[m] * contents[m + 1]) == 0
                           for m in range(len(contents) - 1))
    dz_content = ys.at(i - 2).wedge(ys.at(i)).content()  # = content(d_i z_{i+1})
    content_pairs_relaxed_ok = all(dz_content % (contents[m] * contents[m + 1]) == 0
                                   for m in range(len(contents) - 1))
    content_gcd_ok = all(cy % gcd(contents[m], contents[m + 1]) == 0
                         for m in range(len(contents) - 1))
    # integer decomposition over (y_i, y_{i+1}):
    # d_{i+2} x_m = alpha_m y_i + beta_m y_{i+1},
    # alpha_m = d_i (d_{i+1} p_m - t_{i+1} q_m), beta_m = d_i q_m
    d_i2 = d_next * d_i
    alpha_beta = []
    decomposition_ok = True
    for (p, q), x in zip(conv, points):
        alpha = d_i * (d_next * p - t_next * q)
        beta = d_i * q
        alpha_beta.append((alpha, beta))
        if d_i2 * x != alpha * yi + beta * yi1:
            decomposition_ok = False
    return GrayFan(
        i=i,
        quotients=quotients,
        convergents=conv,
        points=points,
        contents=contents,
        alpha_beta=alpha_beta,
        endpoints_ok=endpoints_ok,
        recurrence_ok=recurrence_ok,
        wedge_ok=wedge_ok,
        content_pairs_ok=content_pairs_ok,
        content_pairs_relaxed_ok=content_pairs_relaxed_ok,
        content_gcd_ok=content_gcd_ok,
        decomposition_ok=decomposition_ok,
        reduced_endpoint=reduced,
    )


# ---------------------------------------------------------------------------
# exact inner-product identity used by the norm diagnostics
# ---------------------------------------------------------------------------

def z_dot_y_identity(bundle: Bundle, i: int) -> tuple:
    """Exact check of |<z_i, y_{i+1}>| = |det w_k|^{-1} |det3(y_{t_k-1}, y_i, y_{i+1})|
    for i = t_k + l; returns (lhs, rhs) as Fractions."""
    prog, seq, ys, zs = bundle.prog, bundle.seq, bundle.ys, bundle.zs
    k, _ = prog.block_of(i)
    lhs = abs(rat_dot(zs.at(i), RatVec.from_sym(ys.at(i + 1))))
    rhs = Fraction(abs(det3(ys.at(prog.t(k) - 1), ys.at(i), ys.at(i + 1))), abs(seq.det(k)))
    return lhs, rhs
