"""Decision engine for hyponormality, classification, and completions.

The main pipeline reduces a rational symbol to a finite contractivity
test: factor the analytic/co-analytic parts through diagonal inner
functions, solve the node interpolation systems for a polynomial member
of the candidate set, evaluate it at the triangular shift model, and
compare the largest singular value against 1.  Exact finite-window
operators serve as the independent fallback oracle.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import blaschke as bl
from . import modelspace as ms
from . import operators as op
from .rational import RationalFn
from .symbols import Symbol, RationalSymbol, is_normal_symbol

CONTRACT_TOL = 1e-9
MARGINAL_TOL = 1e-6
RANK_TOL = 1e-8
MEMBERSHIP_TOL = 1e-9
KERNEL_RANK_TOL = 1e-9


@dataclass
class HypoFactorization:
    """Inner/outer data of the two symbol parts.

    Phi_plus = (theta1 theta0) I_n A^* and Phi_minus = theta1 I_n B^* on
    the circle; theta1*theta0 is the least common inner multiple of the
    analytic entries' inner parts, theta1 that of the co-analytic side.
    A and B are grids of disk-analytic rational functions.
    """

    theta1: bl.BlaschkeProduct
    theta0: bl.BlaschkeProduct
    A: list
    B: list
    n: int

    @property
    def theta_full(self):
        return self.theta1 * self.theta0


@dataclass
class Verdict:
    """Tagged decision with its numeric certificate."""

    tag: str
    sigma_max: float | None = None
    defect: np.ndarray | None = None
    rank_defect: int | None = None
    witness: np.ndarray | None = None
    family: int | None = None
    notes: list = field(default_factory=list)

    def to_json_dict(self):
        return {
            "tag": self.tag,
            "sigma_max": self.sigma_max,
            "defect": None
            if self.defect is None
            else [[[v.real, v.imag] for v in row] for row in self.defect],
            "rank_defect": self.rank_defect,
            "witness": None
            if self.witness is None
            else [[v.real, v.imag] for v in self.witness],
            "family": self.family,
            "notes": list(self.notes),
        }


class NotRationalError(TypeError):
    pass


def _as_rational_symbol(phi):
    if isinstance(phi, RationalSymbol):
        return phi
    if isinstance(phi, Symbol):
        return RationalSymbol.from_symbol(phi)
    raise NotRationalError(f"expected a (rational) matrix symbol, got {type(phi)}")


def factorize(phi) -> HypoFactorization:
    """Decompose both symbol parts through diagonal inner functions.

    Entrywise coprime decompositions give the per-entry inner parts; the
    co-analytic inner part must divide the analytic one (a necessary
    condition for a nonempty candidate set), otherwise DivisibilityError
    is raised and the caller reports NotHyponormal.
    """
    R = _as_rational_symbol(phi)
    n = R.n
    theta_plus, tau = _side_inner_lcm(R.plus, n)
    theta_minus, sig = _side_inner_lcm(R.minus, n)
    if not bl.divides(theta_minus, theta_plus):
        raise DivisibilityError(theta_minus, theta_plus)
    theta0 = theta_plus.quotient(theta_minus)
    A = _outer_grid(R.plus, tau, theta_plus, n)
    B = _outer_grid(R.minus, sig, theta_minus, n)
    return HypoFactorization(theta_minus, theta0, A, B, n)


class DivisibilityError(ValueError):
    """Co-analytic inner part does not divide the analytic inner part."""

    def __init__(self, theta_minus, theta_plus):
        self.theta_minus = theta_minus
        self.theta_plus = theta_plus
        super().__init__(
            f"inner divisibility fails: degree {theta_minus.degree()} part "
            f"does not divide degree {theta_plus.degree()} part"
        )


def _side_inner_lcm(entries, n):
    """Per-entry coprime decompositions and their least common inner multiple."""
    lcm = bl.BlaschkeProduct.one()
    parts = [[None] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            f = entries[i][j]
            if f.is_zero():
                parts[i][j] = (bl.BlaschkeProduct.one(), RationalFn([0.0]))
                continue
            theta, b = bl.coanalytic_decompose(f)
            parts[i][j] = (theta, b)
            _, lcm = bl.gcd_lcm(lcm, theta)
    return lcm, parts


def _outer_grid(entries, parts, theta_side, n):
    """A with Phi_side = Theta_side A^*: entry (i, j) = b_{ji} * theta_side/theta_{ji}."""
    A = [[None] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            theta_ji, b_ji = parts[j][i]
            if b_ji.is_zero():
                A[i][j] = RationalFn([0.0])
                continue
            quot = theta_side.quotient(theta_ji)
            A[i][j] = b_ji * quot.as_rational()
    return A


def kernel_inclusion_holds(phi_sym: Symbol, tol=KERNEL_RANK_TOL):
    """Numeric test that the analytic-side Hankel kernel sits inside the
    co-analytic one, via column-space comparison of the adjoint windows."""
    plus, minus = phi_sym.split()
    m, N = phi_sym.degree_bounds()
    W = max(m, N, 1) + 1
    Hp = op.hankel_window(plus.star(), W).block
    Hm = op.hankel_window(minus.star(), W).block
    HpA = Hp.conj().T
    HmA = Hm.conj().T
    scale = max(np.linalg.norm(HpA, 2), np.linalg.norm(HmA, 2), 1.0)
    r1 = np.linalg.matrix_rank(HpA, tol=tol * scale)
    r2 = np.linalg.matrix_rank(np.hstack([HpA, HmA]), tol=tol * scale)
    return r2 == r1


def verify_in_C(phi, K, tol=MEMBERSHIP_TOL):
    """Membership of K in the candidate set: Phi - K Phi* is analytic.

    Checked on exact Fourier coefficients: every negative-degree
    coefficient of Phi - K Phi* has entrywise modulus <= tol.
    """
    S = phi if isinstance(phi, Symbol) else phi.to_symbol()
    Ksym = K if isinstance(K, Symbol) else K.to_symbol()
    diff = S - Ksym * S.star()
    worst = 0.0
    for j in diff.support():
        if j < 0:
            worst = max(worst, float(np.max(np.abs(diff.coeff(j)))))
    return worst <= tol


def _interpolation_data(fact: HypoFactorization):
    """Node list plus Taylor data of A and theta0*B at each node."""
    theta_full = fact.theta_full
    nodes = [(a, m) for a, m in theta_full.zeros]
    t0 = fact.theta0.as_rational()
    n = fact.n
    A_data = []
    B_data = []
    for alpha, m in nodes:
        Aj = np.zeros((m, n, n), dtype=complex)
        Bj = np.zeros((m, n, n), dtype=complex)
        for i in range(n):
            for j in range(n):
                Aj[:, i, j] = fact.A[i][j].taylor_jets(alpha, m)
                Bj[:, i, j] = (t0 * fact.B[i][j]).taylor_jets(alpha, m)
        A_data.append([Aj[k] for k in range(m)])
        B_data.append([Bj[k] for k in range(m)])
    return nodes, A_data, B_data


def _grid_min_singular(grid, points, n):
    out = np.inf
    for a in points:
        M = np.array([[grid[i][j](a) for j in range(n)] for i in range(n)], dtype=complex)
        s = np.linalg.svd(M, compute_uv=False)
        out = min(out, float(s[-1]) if len(s) else 0.0)
    return out


def decide_hyponormal(phi, window_fallback=True, contract_tol=CONTRACT_TOL) -> Verdict:
    """Full decision pipeline for a rational matrix symbol.

    Order of gates: symbol normality, inner divisibility (plus the
    numeric kernel-inclusion test for matrix symbols), solvability of the
    node systems, candidate membership, contractivity of the interpolant
    at the shift model.  A contractive interpolant certifies Hyponormal
    with the defect matrix and its numerical rank; a strict expansion is
    NotHyponormal whenever the compressed outer factor is invertible
    (always, for scalar symbols), and Inconclusive otherwise, with the
    finite-window commutator consulted for a witness.
    """
    R = _as_rational_symbol(phi)
    S = phi if isinstance(phi, Symbol) else R.to_symbol()
    if not is_normal_symbol(S):
        return Verdict("NotHyponormal", notes=["symbol is not normal"])
    try:
        fact = factorize(R)
    except DivisibilityError as e:
        return Verdict("NotHyponormal", notes=[str(e)])
    if R.n > 1 and not kernel_inclusion_holds(S):
        return Verdict("NotHyponormal", notes=["candidate set is empty (kernel inclusion fails)"])
    d = fact.theta_full.degree()
    if d == 0:
        # constant-inner symbol: the operator is a (shifted) analytic/constant one
        return Verdict("Hyponormal", sigma_max=0.0, defect=np.zeros((0, 0)), rank_defect=0,
                       notes=["trivial model space"])
    nodes, A_data, B_data = _interpolation_data(fact)
    try:
        K = ms.hermite_fejer_solve(nodes, A_data, B_data, n=fact.n)
    except ms.InterpolationInconsistent as e:
        return Verdict("NotHyponormal", notes=[f"candidate set is empty: {e}"])
    notes = []
    if K.lsq_nodes:
        notes.append(f"least-squares fallback at nodes {K.lsq_nodes}")
    if not verify_in_C(S, K.poly):
        notes.append("interpolant failed membership verification")
        return Verdict("Inconclusive", notes=notes)
    model = ms.build_M(fact.theta_full.zero_list())
    KM = ms.poly_of_M(K.poly, model)
    sigma = float(np.linalg.svd(KM, compute_uv=False)[0]) if KM.size else 0.0
    if sigma <= 1.0 + contract_tol:
        defect = np.eye(KM.shape[0]) - KM.conj().T @ KM
        vals = np.linalg.eigvalsh(0.5 * (defect + defect.conj().T))
        rank = int(np.sum(vals > RANK_TOL))
        return Verdict("Hyponormal", sigma_max=sigma, defect=defect, rank_defect=rank, notes=notes)
    if sigma <= 1.0 + max(MARGINAL_TOL, contract_tol * 10):
        notes.append(f"contractivity marginal: sigma_max = {sigma:.12g}")
        if window_fallback:
            rep = _window_oracle(S)
            if rep.verdict == "NotPSD":
                return Verdict("NotHyponormal", sigma_max=sigma, witness=rep.witness,
                               notes=notes + ["window oracle found a negative direction"])
            if rep.verdict == "PSD" and rep.exact:
                return Verdict("Hyponormal", sigma_max=sigma, notes=notes + ["window oracle exact PSD"])
        return Verdict("Marginal", sigma_max=sigma, notes=notes)
    # strict expansion: decide via the converse direction when available
    if fact.n == 1:
        return Verdict("NotHyponormal", sigma_max=sigma,
                       notes=notes + ["interpolant is expansive at the model"])
    smin = _grid_min_singular(fact.A, [a for a, _ in fact.theta_full.zeros], fact.n)
    if smin > 1e-9:
        return Verdict("NotHyponormal", sigma_max=sigma,
                       notes=notes + ["interpolant is expansive; compressed outer factor invertible"])
    notes.append("outer factor singular at a model zero; converse unavailable")
    if window_fallback:
        rep = _window_oracle(S)
        if rep.verdict == "NotPSD":
            return Verdict("NotHyponormal", sigma_max=sigma, witness=rep.witness,
                           notes=notes + ["window oracle found a negative direction"])
        notes.append(f"window oracle: {rep.verdict}")
    return Verdict("Inconclusive", sigma_max=sigma, notes=notes)


def _window_oracle(S: Symbol):
    com = op.selfcommutator_exact(S)
    return op.positivity_report(com.block, com.window, exact=com.exact)


def classify_normal_or_analytic(phi, square_window=None) -> Verdict:
    """Normal-or-analytic classification under the coprimality hypothesis.

    Refuses (HypothesisNotMet) when the co-analytic factorization is not
    coprime.  Otherwise returns Analytic for vanishing co-analytic part,
    Normal for vanishing exact self-commutator, and Neither else; in the
    Neither case a positive decision from both the hyponormality pipeline
    and the squared-window test contradicts the classification guarantee
    and is flagged THEOREM-VIOLATION for the harness to count.
    """
    R = _as_rational_symbol(phi)
    S = phi if isinstance(phi, Symbol) else R.to_symbol()
    if R.is_analytic():
        return Verdict("Analytic", notes=["co-analytic part vanishes"])
    theta_minus, parts = _side_inner_lcm(R.minus, R.n)
    B = _outer_grid(R.minus, parts, theta_minus, R.n)
    ok, marginal = bl.coprime_matrix_check(B, theta_minus)
    if not ok:
        return Verdict("HypothesisNotMet",
                       notes=["co-analytic factorization is not coprime; hypothesis not met"])
    notes = ["coprime factorization certified"]
    if marginal:
        notes.append("coprimality is marginal near the cutoff")
    com = op.selfcommutator_exact(S)
    if float(np.max(np.abs(com.block))) <= 1e-9:
        return Verdict("Normal", notes=notes)
    hypo = decide_hyponormal(R)
    if hypo.tag == "Hyponormal":
        W = square_window or max(16, 4 * S.bandwidth() + 4)
        sq = op.square_hypo_window(S, W)
        if sq.verdict == "PSD":
            return Verdict("Neither", notes=notes + [
                "THEOREM-VIOLATION: hyponormal with hyponormal square but neither normal nor analytic"
            ])
    return Verdict("Neither", notes=notes)


# -- completion problems -------------------------------------------------------


def _scalar_coeffs(phi: Symbol):
    return {j: phi.scalar_coeff(j) for j in phi.support()}


def _unimodular_ratio(psi: Symbol, phi: Symbol, tol):
    """u with psi = u*phi, |u| = 1, or None."""
    sup = sorted(set(phi.support()) | set(psi.support()))
    u = None
    for j in sup:
        a = phi.scalar_coeff(j)
        b = psi.scalar_coeff(j)
        if abs(a) <= tol and abs(b) <= tol:
            continue
        if abs(a) <= tol or abs(b) <= tol:
            return None
        r = b / a
        if u is None:
            u = r
        elif abs(r - u) > 10 * tol:
            return None
    if u is None:
        u = 1.0 + 0.0j
    if abs(abs(u) - 1.0) > 10 * tol:
        return None
    return u


def double_conjugate_shift_symbol(phi: Symbol, psi: Symbol) -> Symbol:
    """2x2 symbol [[zbar, phi],[psi, zbar]] of the completion candidate."""
    out = Symbol(2)
    degs = set(phi.support()) | set(psi.support()) | {-1}
    for j in degs:
        A = np.zeros((2, 2), dtype=complex)
        if j == -1:
            A[0, 0] = 1.0
            A[1, 1] = 1.0
        A[0, 1] = phi.scalar_coeff(j)
        A[1, 0] = psi.scalar_coeff(j)
        out = out + Symbol(2, {j: A})
    return out


def complete_ustar(phi: Symbol, psi: Symbol, window=24, tol=1e-9) -> Verdict:
    """Membership of (phi, psi) in the two normal-completion families.

    Family 1: phi = u z + beta with |u| = 1 and psi a unimodular multiple
    of phi.  Family 2: phi = alpha zbar + c z + beta with |c|^2 = 1 +
    |alpha|^2 and psi = exp(i(pi - 2 arg alpha)) phi.  Members give a
    normal completion (exact self-commutator vanishes); non-members are
    cross-checked against the k = 2 window test, which must fail.
    """
    if phi.n != 1 or psi.n != 1:
        raise ValueError("completion entries must be scalar symbols")
    member, family = _family_membership(phi, psi, tol)
    big = double_conjugate_shift_symbol(phi, psi)
    if member:
        com = op.selfcommutator_exact(big)
        worst = float(np.max(np.abs(com.block))) if com.block.size else 0.0
        notes = [f"family {family} parameters; commutator max entry {worst:.3e}"]
        if worst <= 1e-9:
            return Verdict("Normal", family=family, notes=notes)
        return Verdict("Inconclusive", family=family,
                       notes=notes + ["family parameters but nonzero commutator"])
    rep = op.k_hypo_window(big, 2, window)
    if rep.verdict == "NotPSD":
        return Verdict("NotKHyponormal", witness=rep.witness, family=None,
                       notes=["outside both families; k = 2 window is not PSD",
                              f"min eigenvalue {rep.min_eigenvalue:.6e}"])
    return Verdict("ConsistentUpToWindow", family=None,
                   notes=[f"outside both families; k = 2 window verdict {rep.verdict}"])


def _family_membership(phi: Symbol, psi: Symbol, tol):
    c = _scalar_coeffs(phi)
    if any(j not in (-1, 0, 1) for j in c):
        return False, None
    cm1 = c.get(-1, 0.0)
    c1 = c.get(1, 0.0)
    if abs(cm1) < 1e-6:
        # analytic family: unimodular coefficient at z, psi a unimodular multiple
        if abs(abs(c1) - 1.0) > tol:
            return False, None
        u = _unimodular_ratio(psi, phi, tol)
        return (u is not None), 1
    if abs(abs(c1) - np.sqrt(1.0 + abs(cm1) ** 2)) > tol:
        return False, None
    omega = np.exp(1j * (np.pi - 2.0 * np.angle(cm1)))
    diff = psi - Symbol.scalar({j: omega * v for j, v in c.items()})
    if diff.is_zero(tol):
        return True, 2
    return False, None


def no_hypo_completion_shift_pair(phi: Symbol, psi: Symbol, window=16) -> Verdict:
    """No hyponormal completion exists for [[T_z, ?],[?, T_zbar]].

    Normality of [[z, phi],[psi, zbar]] forces phi = -conj(psi) on the
    circle; when that holds, the lower-right block of the self-commutator
    is the rank-one negative T_z T_zbar - 1, so the verdict is always
    NotHyponormal (with its witness) or NotNormalSymbol.
    """
    if phi.n != 1 or psi.n != 1:
        raise ValueError("completion entries must be scalar symbols")
    big = Symbol(2)
    degs = set(phi.support()) | set(psi.support()) | {-1, 1}
    for j in degs:
        A = np.zeros((2, 2), dtype=complex)
        if j == 1:
            A[0, 0] = 1.0
        if j == -1:
            A[1, 1] = 1.0
        A[0, 1] = phi.scalar_coeff(j)
        A[1, 0] = psi.scalar_coeff(j)
        big = big + Symbol(2, {j: A})
    if not is_normal_symbol(big):
        return Verdict("NotNormalSymbol", notes=["completion symbol is not normal"])
    bw = big.bandwidth()
    W = max(window, bw + 2)
    com = op.selfcommutator_exact(big, W)
    block = com.block[1::2, 1::2]  # lower-right scalar component
    rep = op.positivity_report(block, W)
    return Verdict("NotHyponormal", witness=rep.witness,
                   notes=["lower-right commutator block is negative",
                          f"min eigenvalue {rep.min_eigenvalue:.6e}"])
