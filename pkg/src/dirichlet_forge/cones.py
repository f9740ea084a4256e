"""Exact rational polyhedral cones.

Separation of finite point sets from the origin, dual cones by double
description, extreme rays, minimal faces, and construction of an independent
generating set through a prescribed interior direction.  All decisions are
made in Fraction arithmetic via the exact simplex; floats appear only at the
boundary (measured inputs), where an explicit interval policy turns them into
exact intervals before any comparison.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from . import ratlin
from .errors import PreconditionError, ValidationError
from .exactnum import as_fraction, format_frac, parse_frac
from .exact_lp import feasible_geq_one, fourier_motzkin, max_coordinate, nonneg_combination
from .ratlin import canonical_ray, dot, independent_subset, rank, rref

F = Fraction


def _vec(v) -> tuple:
    return tuple(as_fraction(x) for x in v)


def _vecs(vs) -> list:
    return [_vec(v) for v in vs]


def vec_to_json(v) -> list:
    return [format_frac(x) for x in v]


def vec_from_json(data) -> tuple:
    return tuple(parse_frac(s) if isinstance(s, str) else as_fraction(s) for s in data)


@dataclass(frozen=True)
class RationalCone:
    """cone(generators) in Q^dim; generators need not be extreme or distinct."""
    dim: int
    generators: tuple

    def __post_init__(self):
        gens = tuple(_vec(g) for g in self.generators)
        for g in gens:
            if len(g) != self.dim:
                raise ValidationError("generator dimension mismatch")
        object.__setattr__(self, "generators", gens)

    def contains(self, x) -> bool:
        xv = _vec(x)
        if not self.generators:
            return all(v == 0 for v in xv)
        t, _ = nonneg_combination(self.generators, xv)
        return t is not None

    def to_json(self) -> dict:
        return {"dim": self.dim, "generators": [vec_to_json(g) for g in self.generators]}

    @classmethod
    def from_json(cls, data: dict) -> "RationalCone":
        try:
            return cls(int(data["dim"]), tuple(vec_from_json(g) for g in data["generators"]))
        except (KeyError, TypeError, ValueError) as e:
            raise ValidationError(f"malformed cone JSON: {e}") from e


# -- separation ---------------------------------------------------------------


@dataclass
class SeparationResult:
    """Exactly one of `functional` / `zero_coefficients` is set.

    functional: rho with rho . x >= 1 for every input point and
    min_i rho . x_i = 1 exactly (canonical scaling).
    zero_coefficients: nonnegative rationals summing to 1 whose combination
    of the input points is the origin.
    """
    functional: Optional[tuple] = None
    zero_coefficients: Optional[tuple] = None

    @property
    def separated(self) -> bool:
        return self.functional is not None

    def to_json(self) -> dict:
        if self.functional is not None:
            return {"separated": True, "functional": vec_to_json(self.functional)}
        return {"separated": False,
                "zero_coefficients": vec_to_json(self.zero_coefficients)}


def separate(points) -> SeparationResult:
    """Strictly separate a finite set from the origin, or certify 0 in conv.

    The two outcomes are mutually exclusive and exhaustive; both carry exact
    certificates.  Raises on an empty input (both outcomes would be vacuous).
    """
    pts = _vecs(points)
    if not pts:
        raise ValidationError("separation needs at least one point")
    if any(all(x == 0 for x in p) for p in pts):
        # the origin itself is among the points: trivially 0 in conv
        coeffs = [F(1) if all(x == 0 for x in p) else F(0) for p in pts]
        total = sum(coeffs)
        return SeparationResult(zero_coefficients=tuple(ci / total for ci in coeffs))
    rho, coeffs = feasible_geq_one(pts)
    if rho is not None:
        vals = [dot(rho, p) for p in pts]
        mn = min(vals)
        rho = tuple(r / mn for r in rho)  # canonical: min value exactly 1
        return SeparationResult(functional=rho)
    return SeparationResult(zero_coefficients=tuple(coeffs))


def separate_cross_checked(points) -> SeparationResult:
    """separate() with an independent Fourier-Motzkin confirmation (dim <= 3)."""
    res = separate(points)
    pts = _vecs(points)
    d = len(pts[0])
    if d <= 3:
        A = [[-x for x in p] for p in pts]
        b = [F(-1)] * len(pts)
        ok, _ = fourier_motzkin(A, b)
        if ok != res.separated:
            raise AssertionError(
                "simplex and Fourier-Motzkin disagree on separability")
    return res


def sign_covering_zero_witness(vectors):
    """Convex coefficients for 0 from a set covering all sign patterns.

    Input: vectors in Q^d, every entry nonzero, and for each of the 2^d sign
    patterns at least one vector realizing it.  Eliminates the last
    coordinate by pairing opposite-sign vectors with matching leading
    pattern, recursing on d-1.  Returns a tuple of nonnegative rationals
    summing to 1 with sum c_i v_i = 0.
    """
    vs = _vecs(vectors)
    if not vs:
        raise ValidationError("empty input")
    d = len(vs[0])
    for v in vs:
        if len(v) != d:
            raise ValidationError("dimension mismatch")
        if any(x == 0 for x in v):
            raise ValidationError("sign covering requires all entries nonzero")

    # coefficient tracking: each working vector is a convex combination of
    # the original ones; combine coefficient dicts along with the vectors
    work = [(v, {i: F(1)}) for i, v in enumerate(vs)]

    def pattern(v, upto):
        return tuple(x > 0 for x in v[:upto])

    for k in range(d - 1, -1, -1):
        groups: dict = {}
        for v, cmap in work:
            groups.setdefault(pattern(v, k), {"pos": [], "neg": []})[
                "pos" if v[k] > 0 else "neg"].append((v, cmap))
        new_work = []
        for pat, g in groups.items():
            if not g["pos"] or not g["neg"]:
                raise ValidationError(
                    f"missing sign pattern at coordinate {k}: need both signs "
                    f"for leading pattern {pat}")
            (vp, cp), (vn, cn) = g["pos"][0], g["neg"][0]
            mu = -vn[k] / (vp[k] - vn[k])  # in (0, 1)
            comb = tuple(mu * a + (1 - mu) * b for a, b in zip(vp, vn))
            cmap = {i: mu * c for i, c in cp.items()}
            for i, c in cn.items():
                cmap[i] = cmap.get(i, F(0)) + (1 - mu) * c
            new_work.append((comb, cmap))
        work = new_work

    # all coordinates eliminated: the single survivor is the zero vector
    v, cmap = work[0]
    assert all(x == 0 for x in v)
    out = [F(0)] * len(vs)
    for i, c in cmap.items():
        out[i] = c
    total = sum(out)
    return tuple(c / total for c in out)


# -- dual cones ---------------------------------------------------------------


@dataclass
class DualConeResult:
    dim: int
    rays: tuple          # canonical generating rays of {y : y . g >= 0 for all g}
    lineality_dim: int   # dimension of the contained linear subspace

    def to_json(self) -> dict:
        return {"dim": self.dim, "rays": [vec_to_json(r) for r in self.rays],
                "lineality_dim": self.lineality_dim}


def _prune_redundant_rays(rays):
    """Drop rays lying in the cone of the remaining ones (exact LP per ray)."""
    rays = list(dict.fromkeys(rays))
    changed = True
    while changed:
        changed = False
        for i in range(len(rays)):
            others = rays[:i] + rays[i + 1:]
            if not others:
                break
            t, _ = nonneg_combination(others, rays[i])
            if t is not None:
                del rays[i]
                changed = True
                break
    return rays


def dual_cone(generators, dim: Optional[int] = None) -> DualConeResult:
    """{y : y . g >= 0 for all generators g} by halfspace-at-a-time refinement.

    Starts from the full space (rays +-e_i) and cuts one generator halfspace
    at a time, combining every (positive, negative) ray pair on the boundary;
    after each cut the ray list is pruned to an irredundant set by exact LP.
    """
    gens = _vecs(generators)
    if dim is None:
        if not gens:
            raise ValidationError("need generators or an explicit dimension")
        dim = len(gens[0])
    for g in gens:
        if len(g) != dim:
            raise ValidationError("generator dimension mismatch")
    rays = []
    for i in range(dim):
        e = tuple(F(1) if j == i else F(0) for j in range(dim))
        rays.append(e)
        rays.append(tuple(-x for x in e))
    for g in gens:
        if all(x == 0 for x in g):
            continue
        pos = [r for r in rays if dot(r, g) > 0]
        zer = [r for r in rays if dot(r, g) == 0]
        neg = [r for r in rays if dot(r, g) < 0]
        new = pos + zer
        for rp in pos:
            a = dot(rp, g)
            for rn in neg:
                bq = dot(rn, g)
                comb = tuple(a * x - bq * y for x, y in zip(rn, rp))
                if any(x != 0 for x in comb):
                    new.append(canonical_ray(comb))
        rays = _prune_redundant_rays([canonical_ray(r) for r in new])
    # lineality of the dual = orthogonal complement of the generator span
    lin = dim - rank(gens) if gens else dim
    rays.sort()
    return DualConeResult(dim=dim, rays=tuple(rays), lineality_dim=lin)


# -- extreme rays and pointedness ---------------------------------------------


def conv_contains_zero(points):
    """(True, coeffs) if 0 is a convex combination of the points, else (False, rho)."""
    res = separate(points)
    if res.separated:
        return False, res.functional
    return True, res.zero_coefficients


def is_pointed(generators) -> bool:
    """cone(generators) contains no line iff 0 is outside conv of the
    (nonzero, canonicalized) generators."""
    gens = [g for g in _vecs(generators) if any(x != 0 for x in g)]
    if not gens:
        return True
    inside, _ = conv_contains_zero([canonical_ray(g) for g in gens])
    return not inside


def extreme_rays(generators):
    """Canonical extreme rays of a pointed cone.

    Raises PreconditionError when the cone contains a line (extreme rays do
    not generate it then).  A ray is extreme iff it is not a nonnegative
    combination of the other rays.
    """
    gens = [canonical_ray(g) for g in _vecs(generators) if any(x != 0 for x in g)]
    gens = list(dict.fromkeys(gens))
    if not gens:
        return []
    if not is_pointed(gens):
        raise PreconditionError("cone contains a line; no extreme-ray description")
    out = []
    for i, g in enumerate(gens):
        others = gens[:i] + gens[i + 1:]
        if not others:
            out.append(g)
            continue
        t, _ = nonneg_combination(others, g)
        if t is None:
            out.append(g)
    return sorted(out)


# -- minimal faces ------------------------------------------------------------

# Interval policy for float inputs: a float coordinate x stands for the exact
# interval [Fraction(x) - delta, Fraction(x) + delta].  A facet evaluation
# whose interval straddles zero at the loose rung but not the tight one is
# ambiguous; the policy resolves ambiguity toward "not tight", i.e. the
# larger face, and flags it.
TIGHT_RUNG = F(1, 10 ** 12)
LOOSE_RUNG = F(1, 10 ** 7)


@dataclass
class FaceResult:
    generator_indices: tuple    # indices into the input generator list
    generators: tuple           # the corresponding vectors
    tight_normals: tuple        # facet functionals vanishing on the face
    ambiguous: bool = False     # float policy had to resolve a borderline facet
    note: str = ""

    def to_json(self) -> dict:
        return {"generator_indices": list(self.generator_indices),
                "generators": [vec_to_json(g) for g in self.generators],
                "tight_normals": [vec_to_json(nv) for nv in self.tight_normals],
                "ambiguous": self.ambiguous,
                "note": self.note}


def minimal_face_containing(cone: RationalCone, x, exact: Optional[bool] = None) -> FaceResult:
    """Smallest face of the cone containing x.

    Exact rational x: LP support maximization.  The face is generated by the
    generators that can carry strictly positive weight in some representation
    of x; x then lies in the relative interior of their cone.

    Float x (exact=False or float entries): facet normals of the cone are
    evaluated on the interval hull of x under the two-rung policy above.
    """
    gens = list(cone.generators)
    if exact is None:
        exact = not any(isinstance(v, float) for v in x)
    if exact:
        xv = _vec(x)
        if all(v == 0 for v in xv):
            return FaceResult((), (), (), note="x = 0: the face is the origin")
        t, _ = nonneg_combination(gens, xv)
        if t is None:
            raise PreconditionError("x is not in the cone")
        marked = {i for i, ti in enumerate(t) if ti > 0}
        for i in range(len(gens)):
            if i in marked:
                continue
            val, sol = max_coordinate(gens, xv, i, cap=F(1))
            if val is not None and val > 0:
                marked.add(i)
                marked |= {j for j, tj in enumerate(sol) if tj > 0}
        idx = tuple(sorted(marked))
        dual = dual_cone(gens, cone.dim)
        tight = tuple(nv for nv in dual.rays
                      if all(dot(nv, gens[i]) == 0 for i in idx))
        return FaceResult(idx, tuple(gens[i] for i in idx), tight)

    # float path: exact intervals around the measured coordinates
    xf = [as_fraction(float(v)) for v in x]
    scale = max((abs(v) for v in xf), default=F(0)) + F(1)
    dual = dual_cone(gens, cone.dim)
    tight = []
    ambiguous = False
    for nv in dual.rays:
        nscale = sum(abs(c) for c in nv)
        val = abs(dot(nv, xf))
        bound = nscale * scale
        if val <= TIGHT_RUNG * bound:
            tight.append(nv)
        elif val <= LOOSE_RUNG * bound:
            ambiguous = True  # resolved toward non-tight: the larger face
    idx = tuple(i for i, g in enumerate(gens)
                if all(dot(nv, g) == 0 for nv in tight))
    return FaceResult(idx, tuple(gens[i] for i in idx), tuple(tight),
                      ambiguous=ambiguous,
                      note="interval policy on float input" if ambiguous else "")


# -- independent generating set through a point -------------------------------


@dataclass
class ConeBasisResult:
    vectors: tuple        # Q-linearly independent, all inside the cone
    coefficients: tuple   # eta = sum coefficients_i vectors_i, all >= 0
    extended: tuple       # indices of vectors added by rank completion

    def to_json(self) -> dict:
        return {"vectors": [vec_to_json(v) for v in self.vectors],
                "coefficients": vec_to_json(self.coefficients),
                "extended": list(self.extended)}


def _span_coordinates(gens):
    """(basis rows of span, forward map vec -> coords, inverse map coords -> vec)."""
    basis_rows, _ = rref(gens)
    ell = len(basis_rows)

    def to_coords(v):
        sol = ratlin.solve([[basis_rows[i][j] for i in range(ell)]
                            for j in range(len(v))], list(v))
        return None if sol is None else tuple(sol)

    def from_coords(cs):
        out = [F(0)] * len(basis_rows[0])
        for c, row in zip(cs, basis_rows):
            for j, rj in enumerate(row):
                out[j] += c * rj
        return tuple(out)

    return basis_rows, to_coords, from_coords


def basis_through_point(generators, eta, first=None) -> ConeBasisResult:
    """Independent vectors from the cone whose nonnegative span contains eta.

    Walk: scale a starting generator onto the slice {y . chi = eta . chi}
    (chi a strictly positive functional from separate()), move along the
    segment toward eta and past it until a facet binds, split eta between the
    start vector and the facet point, and recurse inside the facet.  The
    resulting vectors are completed to a basis of span(generators) by greedy
    extreme-ray extension.  `first` requests a specific cone vector as the
    starting b_1 (used when a distinguished direction must lead the basis).
    """
    gens = [g for g in _vecs(generators) if any(x != 0 for x in g)]
    if not gens:
        raise ValidationError("no nonzero generators")
    eta = _vec(eta)
    if not is_pointed(gens):
        raise PreconditionError("cone contains a line")
    t, _ = nonneg_combination(gens, eta)
    if t is None:
        raise PreconditionError("eta is not in the cone")

    # work in exact coordinates of span(generators)
    basis_rows, to_coords, from_coords = _span_coordinates(gens)
    ell = len(basis_rows)
    gcs = [to_coords(g) for g in gens]
    eta_c = to_coords(eta)
    if eta_c is None:
        raise PreconditionError("eta is outside the span of the generators")
    first_c = None
    if first is not None:
        first_c = to_coords(_vec(first))
        if first_c is None:
            raise PreconditionError("requested leading vector outside the span")

    def walk(gcs_cur, eta_cur, lead):
        """Returns a list of independent coordinate vectors in cone(gcs_cur)
        whose nonnegative span contains eta_cur."""
        gcs_cur = [canonical_ray(g) for g in gcs_cur if any(x != 0 for x in g)]
        gcs_cur = list(dict.fromkeys(gcs_cur))
        if all(x == 0 for x in eta_cur):
            return []
        if len(gcs_cur) == 1 or rank(gcs_cur) == 1:
            return [gcs_cur[0]]
        chi = separate(gcs_cur).functional  # strictly positive on the cone
        if chi is None:
            raise PreconditionError("cone lost pointedness during the walk")
        b1 = None
        if lead is not None:
            tt, _ = nonneg_combination(gcs_cur, lead)
            if tt is not None and any(x != 0 for x in lead):
                b1 = tuple(lead)
        if b1 is None:
            b1 = gcs_cur[0]  # deterministic: lowest-index generator
        # scale b1 onto the slice {y . chi = eta . chi}
        target = dot(eta_cur, chi)
        b1k = tuple(x * target / dot(b1, chi) for x in b1)
        direction = tuple(e - b for e, b in zip(eta_cur, b1k))
        if all(x == 0 for x in direction):
            return [b1]  # eta is on the b1 ray
        # facet normals of the current cone (full-dimensional in its span is
        # not guaranteed here, but supporting functionals from the dual are
        # exactly what binds the segment)
        dual = dual_cone(gcs_cur, len(eta_cur))
        t_star = None
        for nv in dual.rays:
            slope = dot(nv, direction)
            if slope < 0:
                tb = -dot(nv, b1k) / slope  # n . d(t) = 0
                if tb >= 1 and (t_star is None or tb < t_star):
                    t_star = tb
        if t_star is None:
            # eta strictly inside along this segment and the segment never
            # exits: can only happen when eta is on the b1 ray (handled) or
            # the cone is not pointed (excluded); guard anyway
            return [b1]
        d_star = tuple(b + t_star * dxy for b, dxy in zip(b1k, direction))
        binding = [nv for nv in dual.rays
                   if dot(nv, d_star) == 0 and dot(nv, direction) < 0]
        nstar = binding[0]
        face = [g for g in gcs_cur if dot(nstar, g) == 0]
        if not face:
            return [b1]
        sub = walk(face, d_star, None)
        if t_star == 1:
            # eta itself lies on the facet: descend without consuming b1
            return sub
        # nstar vanishes on every face vector but is positive on b1, so b1 is
        # automatically independent of sub
        return [b1] + sub

    vecs_c = walk(gcs, eta_c, first_c)
    # complete to a basis of the span by extreme rays
    extended = []
    if rank(vecs_c) < ell:
        for r in extreme_rays(gcs):
            if rank(vecs_c + [r]) > rank(vecs_c):
                extended.append(len(vecs_c))
                vecs_c.append(r)
            if rank(vecs_c) == ell:
                break
    if rank(vecs_c) != len(vecs_c):
        raise AssertionError("walk produced dependent vectors")
    # eta coefficients over the final independent set (unique)
    rows = [[vecs_c[i][j] for i in range(len(vecs_c))] for j in range(ell)]
    coeff = ratlin.solve(rows, list(eta_c))
    if coeff is None or any(c < 0 for c in coeff):
        raise AssertionError("eta left the cone of the walk output")
    vecs = tuple(from_coords(v) for v in vecs_c)
    return ConeBasisResult(vectors=vecs, coefficients=tuple(coeff),
                           extended=tuple(extended))
