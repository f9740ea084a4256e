"""Polyhedral cone machinery: separation, duals, faces, basis walks."""

import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from dirichlet_forge.cones import (
    ConeBasisResult,
    RationalCone,
    basis_through_point,
    conv_contains_zero,
    dual_cone,
    extreme_rays,
    is_pointed,
    minimal_face_containing,
    separate,
    separate_cross_checked,
    sign_covering_zero_witness,
)
from dirichlet_forge.errors import PreconditionError, ValidationError
from dirichlet_forge.exact_lp import nonneg_combination
from dirichlet_forge.ratlin import dot, rank
from tests.oracles import in_cone_brute

F = Fraction
small = st.fractions(min_value=F(-4), max_value=F(4), max_denominator=3)


# -- separation ---------------------------------------------------------------

def test_separate_quadrant_points():
    res = separate([(1, 0), (0, 1), (2, 3)])
    assert res.separated
    rho = res.functional
    vals = [dot(rho, p) for p in [(F(1), F(0)), (F(0), F(1)), (F(2), F(3))]]
    assert all(v >= 1 for v in vals)
    assert min(vals) == 1  # canonical scaling


def test_separate_zero_in_hull():
    res = separate([(1, 1), (-1, -1)])
    assert not res.separated
    cs = res.zero_coefficients
    assert sum(cs) == 1 and all(c >= 0 for c in cs)
    assert sum(c * p for c, p in zip(cs, [F(1), F(-1)])) == 0


def test_separate_origin_among_points():
    res = separate([(0, 0), (1, 0)])
    assert not res.separated
    assert res.zero_coefficients == (F(1), F(0))


def test_separate_empty_raises():
    with pytest.raises(ValidationError):
        separate([])


def test_separate_json_shapes():
    js = separate([(1, 0)]).to_json()
    assert js["separated"] is True and "functional" in js
    js = separate([(1,), (-1,)]).to_json()
    assert js["separated"] is False and "zero_coefficients" in js


# -- sign covering ------------------------------------------------------------

def test_sign_covering_one_dimensional_example():
    cs = sign_covering_zero_witness([(F(2),), (F(-3),)])
    assert cs == (F(3, 5), F(2, 5))


def test_sign_covering_two_dimensional():
    vs = [(1, 1), (1, -1), (-1, 1), (-1, -2)]
    cs = sign_covering_zero_witness(vs)
    assert sum(cs) == 1
    assert all(c >= 0 for c in cs)
    for d in range(2):
        assert sum(c * F(v[d]) for c, v in zip(cs, vs)) == 0


def test_sign_covering_rejects_zero_entries():
    with pytest.raises(ValidationError):
        sign_covering_zero_witness([(1, 0), (-1, -1), (1, -1), (-1, 1)])


def test_sign_covering_rejects_missing_pattern():
    with pytest.raises(ValidationError):
        sign_covering_zero_witness([(1, 1), (-1, 1)])  # no negative second sign


# -- dual cones ---------------------------------------------------------------

def test_dual_of_quadrant_is_quadrant():
    res = dual_cone([(1, 0), (0, 1)])
    assert set(res.rays) == {(F(1), F(0)), (F(0), F(1))}
    assert res.lineality_dim == 0


def test_dual_of_halfspace_generator():
    # single generator (1, 0): dual {y1 >= 0} has lineality in y2
    res = dual_cone([(1, 0)])
    assert res.lineality_dim == 1
    cone = RationalCone(2, res.rays)
    assert cone.contains((1, 5))
    assert cone.contains((1, -5))
    assert cone.contains((0, 1)) and cone.contains((0, -1))
    assert not cone.contains((-1, 0))


def test_dual_of_full_space_is_origin():
    res = dual_cone([(1, 0), (-1, 0), (0, 1), (0, -1)])
    assert res.rays == ()
    assert res.lineality_dim == 0


def test_dual_cone_obtuse():
    # cone spanned by (1,0) and (1,1): dual spanned by (0,1) and (1,-1)
    res = dual_cone([(1, 0), (1, 1)])
    assert set(res.rays) == {(F(0), F(1)), (F(1), F(-1))}


def test_dual_membership_grid_cross_check():
    gens = [(2, 1), (1, 3)]
    res = dual_cone(gens)
    dual = RationalCone(2, res.rays)
    for i in range(-4, 5):
        for j in range(-4, 5):
            want = all(i * g[0] + j * g[1] >= 0 for g in gens)
            assert dual.contains((F(i), F(j))) == want, (i, j)


@given(st.lists(st.tuples(small, small), min_size=1, max_size=5))
@settings(max_examples=60, deadline=None)
def test_dual_dual_recovers_cone(gens):
    res = dual_cone(list(gens))
    back = dual_cone(res.rays, 2)
    orig = RationalCone(2, tuple(gens))
    rec = RationalCone(2, back.rays)
    # same cone as a set: generators of each inside the other
    for g in gens:
        assert rec.contains(g)
    for r in back.rays:
        t, _ = nonneg_combination(list(gens), r)
        assert t is not None


@given(st.lists(st.tuples(small, small, small), min_size=1, max_size=4))
@settings(max_examples=40, deadline=None)
def test_dual_dual_recovers_cone_3d(gens):
    res = dual_cone(list(gens), 3)
    back = dual_cone(res.rays, 3)
    rec = RationalCone(3, back.rays)
    for g in gens:
        assert rec.contains(g)
    for r in back.rays:
        t, _ = nonneg_combination(list(gens), r)
        assert t is not None


def test_dual_rays_deterministic():
    a = dual_cone([(1, 2), (3, 1)])
    b = dual_cone([(1, 2), (3, 1)])
    assert a.rays == b.rays


# -- pointedness and extreme rays ----------------------------------------------

def test_is_pointed():
    assert is_pointed([(1, 0), (0, 1)])
    assert not is_pointed([(1, 0), (-1, 0)])
    assert is_pointed([])  # trivial cone


def test_extreme_rays_drops_interior_generator():
    rays = extreme_rays([(1, 0), (0, 1), (1, 1)])
    assert rays == sorted([(F(0), F(1)), (F(1), F(0))])


def test_extreme_rays_dedupes_scalings():
    rays = extreme_rays([(1, 0), (2, 0), (0, 3)])
    assert rays == sorted([(F(0), F(1)), (F(1), F(0))])


def test_extreme_rays_rejects_line():
    with pytest.raises(PreconditionError):
        extreme_rays([(1, 0), (-1, 0)])


def test_conv_contains_zero_certificates():
    inside, cs = conv_contains_zero([(1, 1), (-2, -2)])
    assert inside
    assert sum(c * F(p[0]) for c, p in zip(cs, [(1, 1), (-2, -2)])) == 0
    inside, rho = conv_contains_zero([(1, 0), (0, 1)])
    assert not inside
    assert dot(rho, (F(1), F(0))) >= 1


# -- minimal faces --------------------------------------------------------------

def test_minimal_face_interior_point_is_whole_cone():
    cone = RationalCone(2, ((1, 0), (0, 1)))
    face = minimal_face_containing(cone, (F(1), F(1)))
    assert face.generator_indices == (0, 1)


def test_minimal_face_boundary_point():
    cone = RationalCone(2, ((1, 0), (0, 1)))
    face = minimal_face_containing(cone, (F(2), F(0)))
    assert face.generator_indices == (0,)
    assert not face.ambiguous


def test_minimal_face_of_origin():
    cone = RationalCone(2, ((1, 0), (0, 1)))
    face = minimal_face_containing(cone, (F(0), F(0)))
    assert face.generator_indices == ()


def test_minimal_face_requires_membership():
    cone = RationalCone(2, ((1, 0), (0, 1)))
    with pytest.raises(PreconditionError):
        minimal_face_containing(cone, (F(-1), F(0)))


def test_minimal_face_redundant_generator_included():
    # (1,1) is inside the cone of the others; an interior x marks all three
    cone = RationalCone(2, ((1, 0), (0, 1), (1, 1)))
    face = minimal_face_containing(cone, (F(3), F(3)))
    assert 2 in face.generator_indices
    assert face.generator_indices == (0, 1, 2)


def test_minimal_face_float_policy_tight():
    cone = RationalCone(2, ((1, 0), (0, 1)))
    face = minimal_face_containing(cone, (2.0, 1e-15))
    assert face.generator_indices == (0,)
    assert not face.ambiguous


def test_minimal_face_float_policy_clearly_interior():
    cone = RationalCone(2, ((1, 0), (0, 1)))
    face = minimal_face_containing(cone, (1.0, 0.5))
    assert face.generator_indices == (0, 1)


def test_minimal_face_float_policy_ambiguous_goes_large():
    cone = RationalCone(2, ((1, 0), (0, 1)))
    # 1e-9 sits between the rungs: ambiguous, resolved to the larger face
    face = minimal_face_containing(cone, (2.0, 1e-9))
    assert face.ambiguous
    assert face.generator_indices == (0, 1)


@given(st.integers(0, 10 ** 6))
@settings(max_examples=40, deadline=None)
def test_minimal_face_relative_interior_property(seed):
    """x is a strictly positive combination of the face generators."""
    rng = random.Random(seed)
    d = rng.randint(2, 4)
    k = rng.randint(2, 5)
    gens = [tuple(F(rng.randint(0, 3)) for _ in range(d)) for _ in range(k)]
    gens = [g for g in gens if any(x != 0 for x in g)]
    if not gens or not is_pointed(gens):
        return
    t0 = [F(rng.randint(0, 2)) for _ in gens]
    x = tuple(sum(t * g[dd] for t, g in zip(t0, gens)) for dd in range(d))
    cone = RationalCone(d, tuple(gens))
    face = minimal_face_containing(cone, x)
    # every generator that can appear with positive weight is in the face:
    # the witness representation t0 itself must be supported inside it
    for i, ti in enumerate(t0):
        if ti > 0:
            assert i in face.generator_indices
    # and x must be representable using face generators only
    if face.generators:
        t, _ = nonneg_combination(list(face.generators), x)
        assert t is not None
    else:
        assert all(v == 0 for v in x)


# -- basis through a point ------------------------------------------------------

def test_basis_walk_quadrant_example():
    # eta interior to the quadrant: the walk splits it over both axes
    res = basis_through_point([(1, 0), (0, 1)], (F(1), F(1)))
    assert set(res.vectors) == {(F(1), F(0)), (F(0), F(1))}
    assert all(c > 0 for c in res.coefficients)


def test_basis_walk_eta_on_ray():
    res = basis_through_point([(1, 0), (0, 1)], (F(3), F(0)))
    assert res.vectors[0] == (F(1), F(0))
    # completion adds the other axis to reach full rank
    assert rank(list(res.vectors)) == 2
    recon = [sum(c * v[d] for c, v in zip(res.coefficients, res.vectors))
             for d in range(2)]
    assert recon == [F(3), F(0)]


def test_basis_walk_eta_zero():
    res = basis_through_point([(1, 0), (0, 1)], (F(0), F(0)))
    assert rank(list(res.vectors)) == 2
    assert all(c == 0 for c in res.coefficients)


def test_basis_walk_single_generator():
    res = basis_through_point([(2, 2)], (F(1), F(1)))
    assert len(res.vectors) == 1
    recon = [res.coefficients[0] * v for v in res.vectors[0]]
    assert recon == [F(1), F(1)]


def test_basis_walk_respects_first_request():
    theta = (F(1), F(1))
    res = basis_through_point([(1, 0), (0, 1), (1, 1)], (F(2), F(1)),
                              first=theta)
    assert res.vectors[0] == theta


def test_basis_walk_rejects_outside_eta():
    with pytest.raises(PreconditionError):
        basis_through_point([(1, 0), (0, 1)], (F(-1), F(0)))


def test_basis_walk_rejects_line():
    with pytest.raises(PreconditionError):
        basis_through_point([(1, 0), (-1, 0)], (F(0), F(0)))


def test_basis_walk_lower_dimensional_span():
    # generators span a plane inside Q^3
    gens = [(1, 0, 1), (0, 1, 1)]
    eta = (F(2), F(3), F(5))
    res = basis_through_point(gens, eta)
    assert len(res.vectors) == 2
    recon = [sum(c * v[d] for c, v in zip(res.coefficients, res.vectors))
             for d in range(3)]
    assert recon == list(eta)


@given(st.integers(0, 10 ** 6))
@settings(max_examples=50, deadline=None)
def test_basis_walk_reconstruction_property(seed):
    rng = random.Random(seed)
    d = rng.randint(2, 4)
    k = rng.randint(2, 5)
    gens = [tuple(F(rng.randint(0, 3)) for _ in range(d)) for _ in range(k)]
    gens = [g for g in gens if any(x != 0 for x in g)]
    if not gens:
        return
    t0 = [F(rng.randint(0, 3)) for _ in gens]
    eta = tuple(sum(t * g[dd] for t, g in zip(t0, gens)) for dd in range(d))
    res = basis_through_point(gens, eta)
    vecs = list(res.vectors)
    # independent, inside the cone, spanning the generator span
    assert rank(vecs) == len(vecs) == rank(gens)
    for v in vecs:
        t, _ = nonneg_combination(gens, v)
        assert t is not None
    recon = [sum(c * v[dd] for c, v in zip(res.coefficients, vecs))
             for dd in range(d)]
    assert list(recon) == list(eta)
    assert all(c >= 0 for c in res.coefficients)


def test_in_cone_brute_oracle_agreement():
    gens = [(1, 0), (1, 2)]
    cone = RationalCone(2, tuple(gens))
    for x in [(2, 2), (1, 1), (0, 1), (2, 0), (1, 3)]:
        want = in_cone_brute(x, gens)
        assert cone.contains((F(x[0]), F(x[1]))) == want, x


def test_separate_cross_checked_smoke():
    res = separate_cross_checked([(1, 0), (0, 1)])
    assert res.separated
    res = separate_cross_checked([(1,), (-2,)])
    assert not res.separated
