import numpy as np

from blocktoeplitz.rational import RationalFn
from blocktoeplitz.symbols import (
    Symbol,
    RationalSymbol,
    fourier_coeff,
    is_normal_symbol,
    multiply,
    rational_to_scalar_symbol,
    split,
    sup_norm,
    tilde,
)

X = np.array([[0, 1], [1, 0]], dtype=complex)


def random_symbol(rng, n=2, m=2, N=2):
    coeffs = {}
    for j in range(-m, N + 1):
        coeffs[j] = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return Symbol(n, coeffs)


def test_fourier_coeff_scalar():
    phi = Symbol.scalar({-1: 1, 1: 2})
    assert fourier_coeff(phi, 1)[0, 0] == 2
    assert fourier_coeff(phi, 0)[0, 0] == 0


def test_fourier_coeff_matrix_offdiag():
    phi = Symbol(2, {-1: np.eye(2), -2: X, 2: 2 * X})
    np.testing.assert_allclose(fourier_coeff(phi, -2), X)


def test_split_example():
    phi = Symbol.scalar({-2: 1, -1: 2, 1: 1, 2: 2})
    plus, minus = split(phi)
    assert plus.support() == [1, 2]
    assert minus.scalar_coeff(1) == 2
    assert minus.scalar_coeff(2) == 1


def test_split_trivials():
    plus, minus = split(Symbol.scalar({1: 1}))
    assert minus.is_zero()
    phi = Symbol(2, {-1: np.eye(2)})
    plus, minus = split(phi)
    assert plus.is_zero()
    np.testing.assert_allclose(minus.coeff(1), np.eye(2))


def test_split_reconstruction():
    rng = np.random.default_rng(0)
    for _ in range(5):
        phi = random_symbol(rng)
        plus, minus = phi.split()
        assert (minus.star() + plus - phi).is_zero(1e-14)


def test_tilde_involution_and_antihomomorphism():
    rng = np.random.default_rng(1)
    phi = random_symbol(rng)
    psi = random_symbol(rng)
    assert tilde(tilde(phi)).equals(phi, 1e-14)
    assert tilde(phi * psi).equals(tilde(psi) * tilde(phi), 1e-12)


def test_multiply_examples():
    z = Symbol.scalar({1: 1})
    zbar = Symbol.scalar({-1: 1})
    assert multiply(z, zbar).scalar_coeff(0) == 1
    sq = multiply(Symbol.scalar({-1: 1, 1: 2}), Symbol.scalar({-1: 1, 1: 2}))
    assert sq.scalar_coeff(-2) == 1
    assert sq.scalar_coeff(0) == 4
    assert sq.scalar_coeff(2) == 4


def test_multiply_distributes():
    rng = np.random.default_rng(2)
    a, b, c = (random_symbol(rng) for _ in range(3))
    lhs = a * (b + c)
    rhs = a * b + a * c
    assert lhs.equals(rhs, 1e-10)


def test_normality_scalar_always():
    assert is_normal_symbol(Symbol.scalar({-3: 1j, 2: 5}))


def test_normality_matrix_cases():
    # [[zbar, -conj(psi)],[psi, zbar]] with psi = z is normal
    good = Symbol(2, {-1: np.array([[1, -1], [0, 1]]), 1: np.array([[0, 0], [1, 0]])})
    assert is_normal_symbol(good)
    # mixed-shift diagonal [[z, z],[z, zbar]]: needs phi = -conj(psi), violated
    bad = Symbol(2, {1: np.array([[1, 1], [1, 0]]), -1: np.array([[0, 0], [0, 1]])})
    assert not is_normal_symbol(bad)
    # [[zbar, z],[z, zbar]] has equal moduli off the diagonal: normal
    assert is_normal_symbol(Symbol(2, {-1: np.eye(2), 1: X}))


def test_normality_constant_shift_invariant():
    rng = np.random.default_rng(3)
    phi = random_symbol(rng)
    shifted = phi + Symbol(2, {0: (1.7 - 0.3j) * np.eye(2)})
    assert is_normal_symbol(phi) == is_normal_symbol(shifted)
    d1 = phi.star() * phi - phi * phi.star()
    d2 = shifted.star() * shifted - shifted * shifted.star()
    assert d1.equals(d2, 1e-10)


def test_sup_norm_values():
    assert abs(sup_norm(Symbol.scalar({1: 1})) - 1.0) < 1e-12
    k = Symbol.scalar({0: 0.5, 1: 0.75})
    assert abs(sup_norm(k) - 1.25) < 1e-12
    K = Symbol(2, {0: 0.5 * np.eye(2), 1: 0.5 * X})
    assert abs(sup_norm(K) - 1.0) < 1e-12


def test_sup_norm_grid_refinement():
    phi = Symbol.scalar({-2: 0.3, 1: 1, 3: 0.2j})
    a = sup_norm(phi, grid=4096)
    b = sup_norm(phi, grid=8192)
    assert b >= a - 1e-15
    assert abs(b - a) < 1e-6


def test_json_roundtrip():
    rng = np.random.default_rng(4)
    phi = random_symbol(rng)
    back = Symbol.from_json(phi.to_json())
    assert back.n == phi.n
    assert phi.equals(back, 0.0)


def test_rational_symbol_roundtrip():
    # symbol with a genuine rational entry: conj(minus) + plus on the circle
    plus = RationalFn([0.5, 1.0], [1.0, 0.5])
    minus = RationalFn([0.0, 1.0])
    sym = rational_to_scalar_symbol(plus, minus)
    t = 2 * np.pi * np.arange(257) / 257
    z = np.exp(1j * t)
    direct = np.conj(minus(z)) + plus(z)
    vals = sym.eval_circle(t)[:, 0, 0]
    np.testing.assert_allclose(vals, direct, atol=1e-12)


def test_rational_symbol_matrix_embedding():
    phi = Symbol(2, {-1: np.eye(2), 2: X})
    R = RationalSymbol.from_symbol(phi)
    assert phi.equals(R.to_symbol(), 1e-13)


def test_multiply_associative():
    rng = np.random.default_rng(9)
    a, b, c = (random_symbol(rng) for _ in range(3))
    assert ((a * b) * c).equals(a * (b * c), 1e-9)


def test_sup_norm_rejects_coarse_grid():
    phi = Symbol.scalar({-4: 1, 4: 1})
    import pytest
    with pytest.raises(ValueError):
        sup_norm(phi, grid=5)
