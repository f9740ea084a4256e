"""Extension of partially prescribed bounded characters.

Input: exact rational generators gamma_0..gamma_{k-1} of an additive
semigroup in [0, inf)^d and prescribed values psi(gamma_i), |psi| <= 1, on a
subset of the indices.  Output: a multiplicative extension phi to the whole
monoid, presented through an auxiliary free basis b_1..b_d over which every
gamma_i has nonnegative integer exponents, so phi is determined by its values
on the b_j.

The construction splits psi into modulus, zero set and phase data:

  * a linear functional rho with rho . gamma_i = -log|psi_i| on the
    prescribed nonzero values (min-norm fit, after exact kernel-relation
    consistency checks),
  * an exactly rational functional theta >= 0 on the cone that vanishes on
    the span of the nonzero prescribed generators and is >= 1 on the
    prescribed zeros (LP feasibility in exact quotient coordinates),
  * zeta = rho + c theta with the smallest integer c >= 0 making zeta
    nonnegative on every generator,
  * a basis of dual-cone vectors walked through zeta's minimal face with
    theta leading, whose inverse-transpose supplies the auxiliary basis.

phi(b_j) = exp(-zeta(b_j)) [theta(b_j) = 0] exp(i omega_j) with the phases
omega fitted modulo 2 pi by a bounded integer search.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np

from .errors import PreconditionError, ValidationError
from .exactnum import as_fraction
from .ratlin import (dot, independent_subset, invert_matrix, kernel_basis,
                     rank, solve, vadd, vscale)
from .exact_lp import feasible_functional, nonneg_combination
from .cones import (TIGHT_RUNG, LOOSE_RUNG, _span_coordinates,
                    basis_through_point, dual_cone, extreme_rays, is_pointed,
                    vec_from_json, vec_to_json)
from .semigroup import free_rational_basis
from .characters import Character

F = Fraction

MODULUS_RELATION_TOL = 1e-9
PHASE_TOL = 1e-8
PHASE_SEARCH_BOUND = 8
BOUND_TOL = 1e-9


def _vec(v):
    return tuple(as_fraction(x) for x in v)


def _cx(v) -> complex:
    if isinstance(v, dict):
        return complex(float(v.get("re", 0.0)), float(v.get("im", 0.0)))
    return complex(v)


@dataclass(frozen=True)
class CharacterExtensionProblem:
    dim: int
    gamma: tuple          # exact rational vectors, all in [0, inf)^dim
    prescribed: dict      # generator index -> complex value, |value| <= 1

    def __post_init__(self):
        gs = tuple(_vec(g) for g in self.gamma)
        if not gs:
            raise ValidationError("no generators")
        for g in gs:
            if len(g) != self.dim:
                raise ValidationError("generator length disagrees with dim")
            if any(x < 0 for x in g):
                raise ValidationError("generators must be coordinatewise nonnegative")
            if all(x == 0 for x in g):
                raise ValidationError("zero generator not allowed")
        object.__setattr__(self, "gamma", gs)
        pres = {}
        for i, v in self.prescribed.items():
            i = int(i)
            if not 0 <= i < len(gs):
                raise ValidationError(f"prescribed index {i} out of range")
            z = _cx(v)
            if abs(z) > 1.0 + 1e-9:
                raise ValidationError(f"prescribed value at {i} has modulus > 1")
            pres[i] = z
        object.__setattr__(self, "prescribed", pres)
        if not is_pointed(gs):
            raise PreconditionError(
                "generators are not pointed: 0 is a rational convex combination")

    def to_json(self) -> dict:
        return {"dim": self.dim,
                "generators": [vec_to_json(g) for g in self.gamma],
                "prescribed": {str(i): {"re": v.real, "im": v.imag}
                               for i, v in sorted(self.prescribed.items())}}

    @classmethod
    def from_json(cls, data: dict) -> "CharacterExtensionProblem":
        return cls(int(data["dim"]),
                   tuple(vec_from_json(g) for g in data["generators"]),
                   {int(i): _cx(v) for i, v in data.get("prescribed", {}).items()})


def polar_split(prescribed: dict):
    """(moduli, phases, zero indices); phases only where the value is nonzero."""
    moduli, phases, zeros = {}, {}, []
    for i, v in sorted(prescribed.items()):
        m = abs(v)
        if m == 0.0:
            zeros.append(i)
        else:
            moduli[i] = m
            phases[i] = cmath.phase(v)
    return moduli, phases, tuple(zeros)


@dataclass(frozen=True)
class ModulusFit:
    functional: tuple           # floats, working dimension
    values: tuple               # functional . gamma_i for every generator
    relation_checks: int
    max_relation_violation: float
    residual: float             # fit residual on the constrained rows
    nonneg_on_prescribed: bool


def modulus_functional(gamma, moduli, tol: float = MODULUS_RELATION_TOL) -> ModulusFit:
    """Min-norm linear functional rho with rho . gamma_i = -log moduli[i].

    Multiplicativity forces every exact rational kernel relation
    sum kappa_i gamma_i = 0 among the constrained generators to be matched by
    the logarithms; a violation beyond tol means no multiplicative extension
    matches the prescribed moduli.
    """
    d = len(gamma[0])
    idx = sorted(moduli)
    if not idx:
        zero = tuple(0.0 for _ in range(d))
        return ModulusFit(zero, tuple(0.0 for _ in gamma), 0, 0.0, 0.0, True)
    rows = [gamma[i] for i in idx]
    rhs = [-math.log(moduli[i]) for i in idx]
    # kernel of the matrix whose columns are the constrained generators
    cols = [[rows[i][j] for i in range(len(rows))] for j in range(d)]
    checks, worst = 0, 0.0
    for kappa in kernel_basis(cols):
        s = sum(float(k) * r for k, r in zip(kappa, rhs))
        scale = 1.0 + sum(abs(float(k) * r) for k, r in zip(kappa, rhs))
        checks += 1
        worst = max(worst, abs(s) / scale)
        if abs(s) > tol * scale:
            raise PreconditionError(
                "prescribed moduli are inconsistent with an exact rational "
                f"relation among the generators (violation {abs(s):.3e})")
    A = np.array([[float(x) for x in r] for r in rows], dtype=float)
    b = np.array(rhs, dtype=float)
    sol, _, _, _ = np.linalg.lstsq(A, b, rcond=None)
    residual = float(np.linalg.norm(A @ sol - b))
    functional = tuple(float(x) for x in sol)
    values = tuple(sum(f * float(x) for f, x in zip(functional, g)) for g in gamma)
    nonneg = all(values[i] >= -tol * (1.0 + abs(rhs[j])) for j, i in enumerate(idx))
    return ModulusFit(functional, values, checks, worst, residual, nonneg)


@dataclass(frozen=True)
class VanishingFit:
    functional: tuple       # exact rational, working dimension
    values: tuple           # exact values on every generator
    strict_indices: tuple   # indices where the functional was forced >= 1


def zero_set_separation(gamma, positive_idx, zero_idx, protect_idx=()) -> VanishingFit:
    """Exact functional theta: 0 on span(gamma[positive_idx]), >= 1 on
    gamma[zero_idx] and on gamma[protect_idx], >= 0 on all other generators.

    Works in exact quotient coordinates modulo the span of the positive set,
    so the vanishing conditions hold identically, and solves one LP
    feasibility problem for the remaining sign conditions.
    """
    d = len(gamma[0])
    pos_rows = [list(gamma[i]) for i in sorted(positive_idx)]
    if pos_rows:
        quot = kernel_basis(pos_rows)       # functionals vanishing on the span
    else:
        quot = [tuple(F(1) if j == i else F(0) for j in range(d)) for i in range(d)]
    proj = {i: tuple(dot(q, gamma[i]) for q in quot) for i in range(len(gamma))}

    zero_tuple = tuple(sorted(zero_idx))
    for i in zero_tuple:
        if all(x == 0 for x in proj[i]):
            raise PreconditionError(
                f"generator {i} is prescribed zero but lies in the span of the "
                "nonzero prescribed generators; no multiplicative extension "
                "separates it")
    strict = sorted(set(zero_tuple) | {i for i in protect_idx
                                       if any(x != 0 for x in proj[i])})
    if not strict:
        theta = tuple(F(0) for _ in range(d))
        return VanishingFit(theta, tuple(F(0) for _ in gamma), ())
    weak = [i for i in range(len(gamma))
            if i not in strict and any(x != 0 for x in proj[i])]
    chi, cert = feasible_functional([proj[i] for i in strict],
                                    [proj[i] for i in weak])
    if chi is None:
        raise PreconditionError(
            "prescribed zero set admits no nonnegative vanishing functional; "
            "a convex combination of the required-positive generators cancels "
            "against the rest")
    theta = [F(0)] * d
    for c, q in zip(chi, quot):
        if c != 0:
            theta = vadd(theta, vscale(c, q))
    values = [dot(theta, g) for g in gamma]
    mn = min(values[i] for i in strict)     # >= 1 by the LP
    theta = tuple(x / mn for x in theta)
    values = tuple(v / mn for v in values)
    return VanishingFit(theta, values, tuple(strict))


def combine_zeta(rho_values, theta_values, tol: float = BOUND_TOL):
    """(c, zeta values): smallest integer c >= 0 with rho + c theta >= -tol
    on every generator.  Raises when theta vanishes where rho is negative,
    since no multiple can repair such a generator."""
    bad = [i for i, (rv, tv) in enumerate(zip(rho_values, theta_values))
           if tv == 0 and rv < -tol]
    if bad:
        raise PreconditionError(
            "prescribed moduli admit no bounded extension: the modulus "
            f"functional is negative on generators {bad} where the vanishing "
            "functional is zero")
    need = 0
    for rv, tv in zip(rho_values, theta_values):
        if tv > 0 and rv < 0:
            need = max(need, math.ceil(-rv / float(tv) - 1e-12))
    c = max(0, need)
    zeta = tuple(rv + c * float(tv) for rv, tv in zip(rho_values, theta_values))
    return c, zeta


@dataclass(frozen=True)
class DualBasisResult:
    functionals: tuple       # exact rational rows, integer-valued on the generators
    basis_vectors: tuple     # exact rational dual basis columns
    exponents: tuple         # per generator: tuple of nonnegative ints
    theta_on_basis: tuple    # exact rational values
    zeta_on_basis: tuple     # floats
    theta_in_face: bool
    tight_rays: tuple        # primal extreme rays annihilated by zeta
    flags: tuple


def _greedy_independent(candidates):
    chosen, dropped = [], []
    for v in candidates:
        if any(x != 0 for x in v) and rank(chosen + [list(v)]) > len(chosen):
            chosen.append(list(v))
        else:
            dropped.append(tuple(v))
    return [tuple(v) for v in chosen], dropped


def build_dual_basis(gamma, theta, zeta_vec) -> DualBasisResult:
    """Basis of dual-cone vectors (theta leading when nonzero), dualized.

    The minimal face of the dual cone containing zeta is located through the
    primal extreme rays zeta annihilates (interval test on the float values),
    a rational point near zeta inside that face is walked to an independent
    subset, and the completed set is rescaled so every generator gets integer
    exponents over the inverse basis.
    """
    d = len(gamma[0])
    flags = []
    prim = extreme_rays(gamma)
    dual = dual_cone(gamma, dim=d).rays

    zmax = max(abs(z) for z in zeta_vec) + 1.0
    tight, ambiguous = [], []
    for r in prim:
        v = sum(z * float(x) for z, x in zip(zeta_vec, r))
        bound = sum(abs(float(x)) for x in r) * zmax
        if abs(v) <= float(TIGHT_RUNG) * bound:
            tight.append(r)
        elif abs(v) <= float(LOOSE_RUNG) * bound:
            ambiguous.append(r)
    if ambiguous:
        flags.append("ambiguous tightness on %d extreme rays; treated as "
                     "non-tight (larger face)" % len(ambiguous))
    face_rays = [y for y in dual
                 if all(dot(y, r) == 0 for r in tight)]

    theta_nonzero = any(x != 0 for x in theta)
    theta_in_face = theta_nonzero and all(dot(theta, r) == 0 for r in tight)

    walk_vectors = []
    if face_rays:
        from scipy.optimize import nnls
        M = np.array([[float(y[j]) for y in face_rays] for j in range(d)])
        coeff, _ = nnls(M, np.array(zeta_vec, dtype=float))
        eta = tuple(F(0) for _ in range(d))
        for cl, y in zip(coeff, face_rays):
            eta = vadd(eta, vscale(F(float(cl)).limit_denominator(10 ** 9), y))
        # nudge into the relative interior so a leading vector survives
        for y in face_rays:
            eta = vadd(eta, vscale(F(1, 10 ** 6), y))
        lead = theta if theta_in_face else None
        gens = list(face_rays) + ([theta] if lead is not None else [])
        walk_vectors = list(basis_through_point(gens, eta, first=lead).vectors)

    order = ([tuple(theta)] if theta_nonzero else []) + walk_vectors + list(dual)
    seen = set()
    uniq = [v for v in order if not (tuple(v) in seen or seen.add(tuple(v)))]
    bstar, dropped = _greedy_independent(uniq)
    if theta_nonzero and walk_vectors and tuple(theta) != tuple(walk_vectors[0]) \
            and any(tuple(v) in dropped for v in walk_vectors):
        flags.append("vanishing functional displaced a walk vector in the basis")
    if len(bstar) != d:
        raise PreconditionError(
            "dual cone is not full-dimensional; generators span a degenerate cone")

    # rescale each functional so its values on the generators are integers
    scaled = []
    for row in bstar:
        L = 1
        for g in gamma:
            L = math.lcm(L, dot(row, g).denominator)
        scaled.append(tuple(x * L for x in row))
    binv = invert_matrix([list(r) for r in scaled])
    basis_vectors = tuple(tuple(binv[j][i] for j in range(d)) for i in range(d))

    exponents = []
    for g in gamma:
        ex = []
        for row in scaled:
            val = dot(row, g)
            assert val.denominator == 1 and val >= 0
            ex.append(int(val))
        exponents.append(tuple(ex))

    theta_on_basis = tuple(dot(theta, b) for b in basis_vectors)
    zeta_on_basis = tuple(sum(z * float(x) for z, x in zip(zeta_vec, b))
                          for b in basis_vectors)
    return DualBasisResult(tuple(scaled), basis_vectors, tuple(exponents),
                           theta_on_basis, zeta_on_basis, theta_in_face,
                           tuple(tight), tuple(flags))


def _fit_phases(expo_rows, targets, nbasis: int,
                bound: int = PHASE_SEARCH_BOUND, tol: float = PHASE_TOL):
    """omega (length nbasis) with expo_rows[i] . omega = targets[i] mod 2 pi.

    Solves on an independent row subset for every choice of 2 pi multiples in
    a bounded integer box (small multiples first) and keeps the first choice
    that verifies on all rows.  Returns (omega, heuristic) where heuristic
    marks the zero-multiple fallback after an exhausted search.
    """
    if not expo_rows:
        return [0.0] * nbasis, False
    rows_frac = [[F(int(e)) for e in row] for row in expo_rows]
    sel = independent_subset(rows_frac)
    A_sel = np.array([[float(e) for e in expo_rows[i]] for i in sel], dtype=float)
    t_sel = np.array([targets[i] for i in sel], dtype=float)
    pinv = np.linalg.pinv(A_sel)
    A_all = np.array(expo_rows, dtype=float)
    t_all = np.array(targets, dtype=float)

    def verify(om):
        res = np.angle(np.exp(1j * (A_all @ om - t_all)))
        return float(np.abs(res).max()) <= tol

    k = len(sel)
    if k > 5:                       # box too large to enumerate
        om = pinv @ t_sel
        return [float(x) for x in om], not verify(om)
    axes = [np.arange(-bound, bound + 1)] * k
    cand = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, k)
    order = np.lexsort(tuple(cand[:, j] for j in reversed(range(k)))
                       + (np.abs(cand).sum(axis=1),))
    cand = cand[order]
    omegas = (t_sel[None, :] + 2.0 * math.pi * cand) @ pinv.T
    res = np.angle(np.exp(1j * (omegas @ A_all.T - t_all[None, :])))
    ok = np.abs(res).max(axis=1) <= tol
    hit = int(np.argmax(ok))
    if ok[hit]:
        return [float(x) for x in omegas[hit]], False
    om = pinv @ t_sel
    return [float(x) for x in om], True


@dataclass(frozen=True)
class CharacterExtensionResult:
    problem: CharacterExtensionProblem
    working_dim: int
    span_rows: tuple             # working coordinates expressed in ambient space
    basis_vectors: tuple         # auxiliary basis, ambient exact rational vectors
    dual_functionals: tuple      # exact rows over the working coordinates
    exponents: tuple             # per generator: nonnegative integer exponents
    phi_basis: tuple             # complex values on the auxiliary basis
    phi_gamma: tuple             # induced values on every generator
    zeta_basis: tuple
    theta_basis: tuple
    zeta_gamma: tuple
    theta_gamma: tuple
    c: int
    prescribed_residual: float
    modulus: ModulusFit
    vanishing: VanishingFit
    flags: tuple

    def to_character(self):
        """(free basis, character) over the auxiliary generators.

        Requires every auxiliary vector to stay in the positive orthant;
        the dualized basis can leave it when the located face of the dual
        cone is not simplicial, in which case only the value maps apply.
        """
        for b in self.basis_vectors:
            if any(x < 0 for x in b):
                raise PreconditionError(
                    "auxiliary basis leaves the positive orthant; "
                    "use the exponent and value maps directly")
        basis = free_rational_basis([list(b) for b in self.basis_vectors],
                                    labels=[f"b{i}" for i in range(len(self.basis_vectors))])
        return basis, Character(basis, self.phi_basis)

    def to_json(self) -> dict:
        return {
            "working_dim": self.working_dim,
            "basis_vectors": [vec_to_json(b) for b in self.basis_vectors],
            "dual_functionals": [vec_to_json(r) for r in self.dual_functionals],
            "exponents": [list(e) for e in self.exponents],
            "phi_basis": [{"re": z.real, "im": z.imag} for z in self.phi_basis],
            "phi_gamma": [{"re": z.real, "im": z.imag} for z in self.phi_gamma],
            "zeta_basis": list(self.zeta_basis),
            "theta_basis": vec_to_json(self.theta_basis),
            "c": self.c,
            "prescribed_residual": self.prescribed_residual,
            "flags": list(self.flags),
        }


def extend_character(problem: CharacterExtensionProblem) -> CharacterExtensionResult:
    flags = []
    gamma0 = problem.gamma
    span_rows, to_coords, from_coords = _span_coordinates([list(g) for g in gamma0])
    d = len(span_rows)
    if d < problem.dim:
        flags.append(f"re-coordinatized to the {d}-dimensional span of the generators")
    gamma = [to_coords(g) for g in gamma0]

    moduli, phases, zeros = polar_split(problem.prescribed)
    positive_idx = sorted(moduli)

    mfit = modulus_functional(gamma, moduli)
    if not mfit.nonneg_on_prescribed:
        flags.append("modulus functional dips below zero on a prescribed generator")

    protect = [i for i in range(len(gamma))
               if i not in moduli and i not in zeros and mfit.values[i] < -BOUND_TOL]
    try:
        vfit = zero_set_separation(gamma, positive_idx, zeros, protect)
    except PreconditionError:
        if not protect:
            raise
        # the protected indices made the system infeasible; drop them and let
        # the combination step decide whether the extension stays bounded
        vfit = zero_set_separation(gamma, positive_idx, zeros, ())
        flags.append("modulus functional negative off the prescribed span; "
                     "vanishing functional could not cover it")

    c, zeta_gamma = combine_zeta(mfit.values, vfit.values)
    zeta_vec = tuple(r + c * float(t) for r, t in zip(mfit.functional, vfit.functional))

    dres = build_dual_basis(gamma, vfit.functional, zeta_vec)
    flags.extend(dres.flags)

    if any(z < -BOUND_TOL for z in dres.zeta_on_basis):
        flags.append("combined functional is negative on an auxiliary generator; "
                     "its value modulus exceeds one")

    # phases: fit on the positive prescribed generators over the new exponents
    expo_rows = [dres.exponents[i] for i in positive_idx]
    targets = [phases[i] for i in positive_idx]
    omega, heuristic = _fit_phases(expo_rows, targets, d)
    if heuristic:
        flags.append("phase system admitted no bounded integer multiples; "
                     "extended heuristically from an independent row subset")

    phi_basis = []
    for i in range(d):
        if dres.theta_on_basis[i] > 0:
            phi_basis.append(0j)
        else:
            phi_basis.append(math.exp(-dres.zeta_on_basis[i])
                             * cmath.exp(1j * omega[i]))
    phi_basis = tuple(phi_basis)

    phi_gamma = []
    for ex in dres.exponents:
        z = complex(1.0)
        for e, zb in zip(ex, phi_basis):
            if e:
                z = 0j if zb == 0 else z * zb ** e
        phi_gamma.append(z)
    phi_gamma = tuple(phi_gamma)

    residual = 0.0
    for i, want in problem.prescribed.items():
        residual = max(residual, abs(phi_gamma[i] - want))
    if residual > 1e-9:
        flags.append(f"prescribed values reproduced only to {residual:.3e}")

    basis_amb = tuple(from_coords(b) for b in dres.basis_vectors)
    return CharacterExtensionResult(
        problem=problem, working_dim=d, span_rows=tuple(tuple(r) for r in span_rows),
        basis_vectors=basis_amb, dual_functionals=dres.functionals,
        exponents=dres.exponents, phi_basis=phi_basis, phi_gamma=phi_gamma,
        zeta_basis=dres.zeta_on_basis, theta_basis=dres.theta_on_basis,
        zeta_gamma=zeta_gamma, theta_gamma=vfit.values, c=c,
        prescribed_residual=residual, modulus=mfit, vanishing=vfit,
        flags=tuple(flags))
