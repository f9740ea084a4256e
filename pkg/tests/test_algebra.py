"""Convolution algebra: products, norms, evaluation, inversion, composition."""

import math
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from dirichlet_forge.algebra import (
    EXACT,
    FLOAT,
    AlgebraElement,
    PowerSeries,
    compose_series,
    convolve,
    delta,
    evaluate_series,
    from_coeffs,
    graded_invert,
    invertibility_witness,
    min_modulus_on_disk,
    neumann_invert,
    unit,
    weighted_norm,
)
from dirichlet_forge.errors import (
    NeumannInapplicableError,
    PreconditionError,
    SingularElementError,
)
from dirichlet_forge.exactnum import QC
from dirichlet_forge.semigroup import log_element, log_primes_basis, natural_basis
from dirichlet_forge.weights import one as w_one, poly as w_poly
from tests.oracles import brute_poly_inverse, brute_poly_mul, mobius_sieve

F = Fraction


def nat_elem(coeff_list, backend=EXACT, truncation=None):
    """Element over N_0 from a dense coefficient list (index = exponent)."""
    b = natural_basis()
    pairs = {}
    for n, c in enumerate(coeff_list):
        if c == 0:
            continue
        val = QC.from_value(F(c)) if backend == EXACT else complex(c)
        pairs[b.element(exponents={0: n})] = val
    return from_coeffs(b, pairs, backend, truncation)


def dense(a, n_max):
    """Dense complex coefficient list of an element over N_0."""
    b = a.basis
    out = []
    for n in range(n_max + 1):
        v = a[b.element(exponents={0: n})]
        out.append(complex(v) if isinstance(v, QC) else complex(v))
    return out


def test_unit_is_identity():
    b = natural_basis()
    e = unit(b, EXACT)
    a = nat_elem([3, 1, 4, 1, 5])
    assert convolve(a, e) == a
    assert convolve(e, a) == a


def test_convolve_matches_schoolbook_product():
    a = nat_elem([1, 2, 3])
    b = nat_elem([4, 5])
    want = brute_poly_mul([1, 2, 3], [4, 5])  # frozen: [4, 13, 22, 15]
    assert want == [4, 13, 22, 15]
    got = dense(convolve(a, b), len(want) - 1)
    assert got == [complex(x) for x in want]


def test_convolve_exact_backend_is_exact():
    a = nat_elem([F(1, 3), F(1, 7)])
    c = convolve(a, a)
    b = natural_basis()
    assert c[b.element(exponents={0: 2})] == QC.from_value(F(1, 49))
    assert c[b.element(exponents={0: 1})] == QC.from_value(F(2, 21))
    assert c.backend == EXACT


def test_convolve_backend_promotion():
    a = nat_elem([1, 2], backend=EXACT)
    b = nat_elem([1.5], backend=FLOAT)
    assert convolve(a, b).backend == FLOAT


def test_convolve_truncation_records_dropped_mass():
    a = nat_elem([1, 1, 1], truncation=2.0)
    b = nat_elem([1, 1, 1], truncation=2.0)
    c = convolve(a, b)
    assert c.truncation == 2.0
    # dropped pairs: (1,2),(2,1),(2,2) each contributing |1*1| = 1
    assert c.dropped_mass == pytest.approx(3.0)
    assert dense(c, 2) == [1, 2, 3]


def test_weighted_norm_values():
    a = nat_elem([1, -2, 3])
    assert weighted_norm(a) == pytest.approx(6.0)
    # poly weight (1+m)^1: 1*1 + 2*2 + 3*3
    assert weighted_norm(a, w_poly(1.0)) == pytest.approx(14.0)


def test_evaluate_series_geometric():
    # a(n) = 2^-n, s real: value sum 2^-n e^{-ns} known in closed form
    a = nat_elem([F(1, 2 ** n) for n in range(30)])
    s = 0.7
    got, tail = evaluate_series(a, s)
    x = 0.5 * math.exp(-s)
    want = (1 - x ** 30) / (1 - x)
    assert got.real == pytest.approx(want, rel=1e-12)
    assert abs(got.imag) < 1e-15
    assert tail is not None and tail.bound >= 0.0


def test_evaluate_series_tail_only_on_right_half_plane():
    a = nat_elem([1, 1])
    _, tail = evaluate_series(a, -0.5)
    assert tail is None
    _, tail = evaluate_series(a, 0.5)
    assert tail is not None


def test_evaluate_series_tail_bound_covers_cut_terms():
    # dropping the stored terms with |lambda|_1 >= ell changes the value by
    # at most the declared bound whenever Re s >= 0 (monotone weight)
    a = nat_elem([F(1, 2 ** n) for n in range(30)])
    s = 0.3
    ell = 15.0
    got, tail = evaluate_series(a, s, ell=ell)
    x = 0.5 * math.exp(-s)
    below = sum(x ** n for n in range(15))
    cut_error = abs(got - below)
    assert tail.cutoff == ell
    assert cut_error <= tail.bound + 1e-15


def test_neumann_invert_geometric():
    a = nat_elem([2, -1])
    b, cert = neumann_invert(a, tol=1e-15)
    assert cert.q == pytest.approx(0.5)
    got = dense(b, 10)
    for n in range(11):
        assert got[n].real == pytest.approx(2.0 ** -(n + 1), rel=1e-12)
    assert cert.residual_norm < 1e-12
    assert cert.tail_bound < 1e-15


def test_neumann_rejects_q_geq_one():
    a = nat_elem([1, 1])  # q = 1
    with pytest.raises(NeumannInapplicableError) as ei:
        neumann_invert(a)
    assert ei.value.payload()["q"] == pytest.approx(1.0)


def test_neumann_rejects_zero_constant_term():
    a = nat_elem([0, 1])
    with pytest.raises(SingularElementError):
        neumann_invert(a)


def test_graded_invert_matches_backsubstitution():
    a = nat_elem([2, -1])
    b = graded_invert(a, truncation=16.0)
    want = brute_poly_inverse([2, -1], 17)
    nb = natural_basis()
    for n in range(17):
        got = b[nb.element(exponents={0: n})]
        assert got == QC.from_value(want[n])


def test_graded_invert_random_poly_exact():
    a = nat_elem([3, 1, -2, 5])
    b = graded_invert(a, truncation=12.0)
    want = brute_poly_inverse([3, 1, -2, 5], 13)
    nb = natural_basis()
    for n in range(13):
        assert b[nb.element(exponents={0: n})] == QC.from_value(want[n])


def test_graded_invert_agrees_with_neumann():
    a = nat_elem([2, -1])
    g = graded_invert(a, truncation=24.0)
    nfl, _ = neumann_invert(nat_elem([2, -1], backend=FLOAT), tol=1e-16)
    for n in range(25):
        nb = natural_basis()
        lam = nb.element(exponents={0: n})
        assert abs(complex(g[lam]) - complex(nfl[lam])) <= 1e-12


def test_graded_invert_mobius_small():
    # coefficients 1 on every log n, n <= 30: inverse must be mu(n)
    N = 30
    b = log_primes_basis(N)
    coeffs = {log_element(b, n): QC.from_value(1) for n in range(1, N + 1)}
    a = from_coeffs(b, coeffs, EXACT, truncation=math.log(N))
    inv = graded_invert(a, truncation=math.log(N) + 1e-9)
    mu = mobius_sieve(N)
    for n in range(1, N + 1):
        got = inv[log_element(b, n)]
        assert got == QC.from_value(mu[n]), f"mu({n})"


def test_invertibility_witness_certifies_dominant_constant():
    a = nat_elem([2, -1], backend=FLOAT)
    rep = invertibility_witness(a)
    assert rep.certified
    assert rep.lower_bound > 0
    # true minimum of |2 - z| on the disk is 1 at z = 1
    assert rep.min_modulus == pytest.approx(1.0, abs=0.05)


def test_invertibility_witness_detects_root_on_disk():
    a = nat_elem([1, -1], backend=FLOAT)  # vanishes at z = 1
    rep = invertibility_witness(a)
    assert not rep.certified
    assert rep.min_modulus < 0.05


def test_min_modulus_on_disk_helper():
    best, argmin, lower = min_modulus_on_disk([2.0, -1.0])
    assert best == pytest.approx(1.0, abs=0.05)
    assert lower <= best


def test_compose_polynomial_is_exact_full_sum():
    # f(z) = 1 + z + z^2 applied to a = delta_1
    b = natural_basis()
    a = delta(b, b.element(exponents={0: 1}), 1.0, FLOAT)
    f = PowerSeries.from_coeffs([1.0, 1.0, 1.0])
    c, cert = compose_series(f, a)
    assert cert.tail_bound == 0.0
    assert dense(c, 3) == [1, 1, 1, 0]


def test_compose_exp_delta_gives_factorials():
    b = natural_basis()
    a = delta(b, b.element(exponents={0: 1}), 1.0, FLOAT)
    f = PowerSeries.exp(radius=4.0)
    c, cert = compose_series(f, a, tol=1e-16)
    got = dense(c, 12)
    for n in range(13):
        assert abs(got[n] - 1.0 / math.factorial(n)) <= 1e-12
    assert cert.q == pytest.approx(1.0)


def test_compose_reciprocal_matches_inverse():
    a = nat_elem([2, -1], backend=FLOAT)
    f = PowerSeries.reciprocal(center=2.0)
    c, cert = compose_series(f, a, tol=1e-15)
    got = dense(c, 20)
    for n in range(21):
        assert abs(got[n] - 2.0 ** -(n + 1)) <= 1e-12
    assert cert.q == pytest.approx(1.0)
    assert cert.radius == pytest.approx(2.0)


def test_compose_outside_radius_reports_gap():
    a = nat_elem([2, -3], backend=FLOAT)  # ||a - 2 eps|| = 3 >= 2
    f = PowerSeries.reciprocal(center=2.0)
    with pytest.raises(PreconditionError):
        compose_series(f, a)


def test_exp_series_requires_finite_radius():
    with pytest.raises(PreconditionError):
        PowerSeries.exp(radius=math.inf)


def test_element_json_roundtrip_exact_and_float():
    a = nat_elem([F(1, 3), 0, F(-2, 7)])
    a2 = AlgebraElement.from_json(a.to_json())
    assert a2 == a
    b = nat_elem([1.5, 2.5], backend=FLOAT)
    b2 = AlgebraElement.from_json(b.to_json())
    assert b2 == b


small_coeffs = st.lists(
    st.integers(-4, 4).map(F), min_size=1, max_size=5)


@given(small_coeffs, small_coeffs)
@settings(max_examples=60, deadline=None)
def test_convolve_commutative(xs, ys):
    a, b = nat_elem(xs), nat_elem(ys)
    assert convolve(a, b) == convolve(b, a)


@given(small_coeffs, small_coeffs, small_coeffs)
@settings(max_examples=40, deadline=None)
def test_convolve_associative_and_distributive(xs, ys, zs):
    a, b, c = nat_elem(xs), nat_elem(ys), nat_elem(zs)
    assert convolve(convolve(a, b), c) == convolve(a, convolve(b, c))
    assert convolve(a, b.add(c)) == convolve(a, b).add(convolve(a, c))


@given(small_coeffs, small_coeffs)
@settings(max_examples=60, deadline=None)
def test_norm_submultiplicative(xs, ys):
    a, b = nat_elem(xs), nat_elem(ys)
    for w in (w_one(), w_poly(2.0)):
        na, nb = weighted_norm(a, w), weighted_norm(b, w)
        assert weighted_norm(convolve(a, b), w) <= na * nb * (1 + 1e-9) + 1e-12


@given(small_coeffs)
@settings(max_examples=30, deadline=None)
def test_graded_inverse_really_inverts(xs):
    if xs[0] == 0:
        xs = [F(1)] + xs[1:]
    a = nat_elem(xs)
    T = 8.0
    inv = graded_invert(a, truncation=T)
    prod = convolve(a.scale(1), inv)
    nb = natural_basis()
    assert prod[nb.zero()] == QC.from_value(1)
    for n in range(1, 9):
        lam = nb.element(exponents={0: n})
        assert prod[lam] == QC.from_value(0)
