"""Matrix Laurent symbols with exact finite Fourier support.

A Symbol stores the coefficient matrices A_j of Phi(z) = sum_j A_j z^j
over a finite support window [-m, N].  All arithmetic is exact Cauchy
product / coefficientwise work on those matrices, with a global drop
tolerance pruning near-zero coefficients.

Rational (non-polynomial) symbols enter as RationalPair grids, see
`RationalSymbol`; their Fourier side is a truncated Symbol with a
certified geometric tail below TAIL_TOL.
"""

from __future__ import annotations

import json

import numpy as np

from .rational import RationalFn

DROP_TOL = 1e-12
TAIL_TOL = 1e-14
EQ_TOL = 1e-10


class Symbol:
    """A matrix-valued trigonometric polynomial sum_j A_j z^j."""

    def __init__(self, n, coeffs=None):
        self.n = int(n)
        self._c = {}
        if coeffs:
            for j, A in coeffs.items():
                self._set(int(j), A)

    def _set(self, j, A):
        A = np.asarray(A, dtype=complex)
        if A.shape != (self.n, self.n):
            raise ValueError(f"coefficient at degree {j} has shape {A.shape}, expected {(self.n, self.n)}")
        if not np.all(np.isfinite(A)):
            raise ValueError("non-finite coefficient")
        if np.max(np.abs(A)) > DROP_TOL:
            self._c[j] = A.copy()

    # -- constructors -----------------------------------------------------
    @classmethod
    def scalar(cls, coeffs):
        """Scalar symbol from a {degree: complex} dict."""
        return cls(1, {j: np.array([[v]], dtype=complex) for j, v in coeffs.items()})

    @classmethod
    def zero(cls, n):
        return cls(n)

    @classmethod
    def identity(cls, n):
        return cls(n, {0: np.eye(n)})

    # -- accessors ---------------------------------------------------------
    def coeff(self, j):
        """Fourier coefficient A_j; zero matrix outside the support."""
        return self._c.get(j, np.zeros((self.n, self.n), dtype=complex)).copy()

    def scalar_coeff(self, j):
        if self.n != 1:
            raise ValueError("scalar_coeff on a matrix symbol")
        return complex(self.coeff(j)[0, 0])

    def support(self):
        return sorted(self._c.keys())

    def degree_bounds(self):
        """(m, N) with support inside [-m, N]; (0, 0) for the zero symbol."""
        if not self._c:
            return 0, 0
        lo = min(self._c)
        hi = max(self._c)
        return max(0, -lo), max(0, hi)

    def bandwidth(self):
        m, N = self.degree_bounds()
        return max(m, N)

    def is_zero(self, tol=DROP_TOL):
        return all(np.max(np.abs(A)) <= tol for A in self._c.values())

    def entry(self, i, j):
        """Scalar symbol of the (i, j) entry."""
        return Symbol.scalar({d: A[i, j] for d, A in self._c.items() if abs(A[i, j]) > DROP_TOL})

    # -- algebra -----------------------------------------------------------
    def __add__(self, other):
        other = self._coerce(other)
        out = Symbol(self.n)
        for j in set(self._c) | set(other._c):
            out._set(j, self.coeff(j) + other.coeff(j))
        return out

    def __sub__(self, other):
        other = self._coerce(other)
        out = Symbol(self.n)
        for j in set(self._c) | set(other._c):
            out._set(j, self.coeff(j) - other.coeff(j))
        return out

    def __neg__(self):
        return Symbol(self.n, {j: -A for j, A in self._c.items()})

    def __mul__(self, other):
        if np.isscalar(other):
            return Symbol(self.n, {j: other * A for j, A in self._c.items()})
        if other.n != self.n:
            raise ValueError(f"size mismatch: {self.n} vs {other.n}")
        acc = {}
        for j, A in self._c.items():
            for k, B in other._c.items():
                d = j + k
                acc[d] = acc.get(d, 0) + A @ B
        out = Symbol(self.n)
        for d, A in acc.items():
            out._set(d, A)
        return out

    def __rmul__(self, scalar):
        return self * scalar

    def _coerce(self, other):
        if isinstance(other, Symbol):
            if other.n != self.n:
                raise ValueError("size mismatch")
            return other
        if np.isscalar(other):
            return Symbol(self.n, {0: complex(other) * np.eye(self.n)})
        raise TypeError(f"cannot combine Symbol with {type(other)}")

    def star(self):
        """Adjoint symbol Phi*(z), with coefficient (A_{-j})^* at degree j."""
        return Symbol(self.n, {-j: A.conj().T for j, A in self._c.items()})

    def tilde(self):
        """The involution Phi~(z) = Phi*(conj(z)); adjoints each coefficient in place."""
        return Symbol(self.n, {j: A.conj().T for j, A in self._c.items()})

    def split(self):
        """Analytic/co-analytic split (Phi_plus, Phi_minus).

        Phi_plus keeps degrees >= 0; Phi_minus is the analytic representative
        of the co-analytic part, with coefficient (A_{-j})^* at degree j >= 1,
        so that Phi = Phi_minus^* + Phi_plus coefficientwise.
        """
        plus = Symbol(self.n, {j: A for j, A in self._c.items() if j >= 0})
        minus = Symbol(self.n, {-j: A.conj().T for j, A in self._c.items() if j < 0})
        return plus, minus

    def transpose(self):
        return Symbol(self.n, {j: A.T for j, A in self._c.items()})

    # -- analysis ------------------------------------------------------------
    def eval_circle(self, t):
        """Values Phi(e^{it}) for an array of angles t; shape (len(t), n, n)."""
        t = np.atleast_1d(np.asarray(t, dtype=float))
        z = np.exp(1j * t)
        out = np.zeros((len(t), self.n, self.n), dtype=complex)
        for j, A in self._c.items():
            out += (z ** j)[:, None, None] * A[None, :, :]
        return out

    def equals(self, other, tol=EQ_TOL):
        return (self - other).is_zero(tol)

    def max_coeff(self):
        if not self._c:
            return 0.0
        return max(float(np.max(np.abs(A))) for A in self._c.values())

    def to_json_dict(self):
        return {
            "n": self.n,
            "coeffs": [
                {
                    "deg": j,
                    "matrix": [[[float(v.real), float(v.imag)] for v in row] for row in A],
                }
                for j, A in sorted(self._c.items())
            ],
        }

    def to_json(self):
        return json.dumps(self.to_json_dict())

    @classmethod
    def from_json_dict(cls, d):
        n = int(d["n"])
        coeffs = {}
        for item in d.get("coeffs", []):
            A = np.array(
                [[complex(v[0], v[1]) for v in row] for row in item["matrix"]],
                dtype=complex,
            )
            coeffs[int(item["deg"])] = A
        return cls(n, coeffs)

    @classmethod
    def from_json(cls, s):
        return cls.from_json_dict(json.loads(s))

    def __repr__(self):
        return f"Symbol(n={self.n}, support={self.support()})"


# -- module-level operation surface --------------------------------------------

def fourier_coeff(phi: Symbol, j: int):
    return phi.coeff(j)


def split(phi: Symbol):
    return phi.split()


def tilde(phi: Symbol):
    return phi.tilde()


def multiply(phi: Symbol, psi: Symbol):
    return phi * psi


def is_normal_symbol(phi: Symbol, tol=1e-9):
    """Whether Phi* Phi = Phi Phi* coefficientwise within tol."""
    if phi.n == 1:
        return True
    diff = phi.star() * phi - phi * phi.star()
    return diff.is_zero(tol)


def sup_norm(phi: Symbol, grid=None):
    """Max spectral norm of Phi over an equispaced circle grid.

    A lower bound for the essential sup norm; for the smooth symbols in
    scope, doubling the grid changes the value below tolerance.  The grid
    must resolve the bandwidth (grid >= 2*bandwidth + 1).
    """
    bw = phi.bandwidth()
    if grid is None:
        grid = max(256, 2 * bw + 1)
    if grid < 2 * bw + 1:
        raise ValueError(f"grid {grid} too coarse for bandwidth {bw}")
    t = 2 * np.pi * np.arange(grid) / grid
    vals = phi.eval_circle(t)
    return float(np.max(np.linalg.norm(vals, ord=2, axis=(1, 2))))


def rational_to_scalar_symbol(plus: RationalFn, minus: RationalFn, tail_tol=TAIL_TOL):
    """Scalar Symbol of conj(minus) + plus, truncating rational tails.

    `plus` and `minus` are disk-analytic; `minus` is the analytic
    representative of the co-analytic part (minus(0) = 0 expected).
    """
    coeffs = {}
    for j, c in enumerate(plus.fourier_coeffs(tail_tol)):
        if abs(c) > DROP_TOL:
            coeffs[j] = coeffs.get(j, 0) + c
    for j, c in enumerate(minus.fourier_coeffs(tail_tol)):
        if j == 0:
            continue
        if abs(c) > DROP_TOL:
            coeffs[-j] = coeffs.get(-j, 0) + np.conj(c)
    return Symbol.scalar(coeffs)


class RationalSymbol:
    """Matrix symbol with exact rational analytic/co-analytic parts.

    entry (i, j) of the symbol is conj(minus[i][j](z)) + plus[i][j](z) on
    the circle, both parts disk-analytic RationalFn with minus in zH^2.
    Trigonometric polynomials embed exactly (denominators 1).
    """

    def __init__(self, n, plus, minus):
        self.n = int(n)
        self.plus = plus
        self.minus = minus

    @classmethod
    def from_symbol(cls, phi: Symbol):
        plus, minus = phi.split()
        P = [[None] * phi.n for _ in range(phi.n)]
        M = [[None] * phi.n for _ in range(phi.n)]
        for i in range(phi.n):
            for j in range(phi.n):
                pc = plus.entry(i, j)
                mc = minus.entry(i, j)
                P[i][j] = _laurent_to_poly(pc)
                M[i][j] = _laurent_to_poly(mc)
        return cls(phi.n, P, M)

    def to_symbol(self, tail_tol=TAIL_TOL):
        out = Symbol(self.n)
        acc = {}
        for i in range(self.n):
            for j in range(self.n):
                cp = self.plus[i][j].fourier_coeffs(tail_tol)
                for d, c in enumerate(cp):
                    if abs(c) > DROP_TOL:
                        acc.setdefault(d, np.zeros((self.n, self.n), complex))[i, j] += c
                cm = self.minus[i][j].fourier_coeffs(tail_tol)
                for d, c in enumerate(cm):
                    if d == 0 or abs(c) <= DROP_TOL:
                        continue
                    acc.setdefault(-d, np.zeros((self.n, self.n), complex))[i, j] += np.conj(c)
        for d, A in acc.items():
            out._set(d, A)
        return out

    def is_analytic(self, tol=DROP_TOL):
        return all(self.minus[i][j].is_zero(tol) for i in range(self.n) for j in range(self.n))

    def __repr__(self):
        return f"RationalSymbol(n={self.n})"


def _laurent_to_poly(scalar_sym: Symbol) -> RationalFn:
    """Scalar Symbol with support >= 0 as a polynomial RationalFn."""
    sup = scalar_sym.support()
    if sup and sup[0] < 0:
        raise ValueError("negative-degree coefficient in analytic entry")
    deg = sup[-1] if sup else 0
    c = np.zeros(deg + 1, dtype=complex)
    for j in sup:
        c[j] = scalar_sym.scalar_coeff(j)
    return RationalFn(c)
