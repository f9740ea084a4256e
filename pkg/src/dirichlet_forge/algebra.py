"""Weighted convolution algebra of finitely supported coefficient maps.

Elements are maps lambda -> coefficient over a shared semigroup basis, with
convolution (a*b)(lambda) = sum over lambda' + lambda'' = lambda.  Two
coefficient backends: "exact" (complex rationals, identity-grade) and
"float" (complex doubles, analysis-grade), chosen per element.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .errors import (BasisMismatchError, PreconditionError, SingularElementError,
                     NeumannInapplicableError, ValidationError, CapExceededError)
from .exactnum import QC, coeff_abs, coeff_is_zero, coeff_to_complex, format_frac, parse_frac
from .semigroup import SemigroupBasis, SemigroupElement, enumerate_monoid
from .weights import WeightFn, one as weight_one

EXACT = "exact"
FLOAT = "float"


def _coerce(value, backend):
    if backend == EXACT:
        return QC.from_value(value)
    return coeff_to_complex(value)


class AlgebraElement:
    """Immutable finitely supported coefficient map over a basis."""

    __slots__ = ("basis", "coeffs", "backend", "truncation", "dropped_mass")

    def __init__(self, basis: SemigroupBasis, coeffs: dict, backend: str = FLOAT,
                 truncation: Optional[float] = None, dropped_mass: float = 0.0,
                 _trusted: bool = False):
        if backend not in (EXACT, FLOAT):
            raise ValidationError(f"unknown backend {backend!r}")
        self.basis = basis
        self.backend = backend
        self.truncation = None if truncation is None else float(truncation)
        self.dropped_mass = float(dropped_mass)
        if _trusted:
            self.coeffs = coeffs
            return
        clean = {}
        for lam, v in coeffs.items():
            if not isinstance(lam, SemigroupElement):
                raise ValidationError("coefficient keys must be semigroup elements")
            if lam.basis is not basis and lam.basis != basis:
                raise BasisMismatchError("coefficient key over a different basis")
            if self.truncation is not None and lam.l1() > self.truncation + 1e-12:
                raise ValidationError("support element beyond declared truncation")
            cv = _coerce(v, backend)
            if not coeff_is_zero(cv):
                clean[lam] = cv
        self.coeffs = clean

    # -- basic structure ----------------------------------------------------

    def support(self):
        return sorted(self.coeffs.keys(), key=lambda e: e.sort_key())

    def __getitem__(self, lam: SemigroupElement):
        v = self.coeffs.get(lam)
        if v is None:
            return QC(0) if self.backend == EXACT else 0j
        return v

    def constant_term(self):
        return self[self.basis.zero()]

    def with_backend(self, backend: str) -> "AlgebraElement":
        if backend == self.backend:
            return self
        return AlgebraElement(self.basis, dict(self.coeffs), backend,
                              self.truncation, self.dropped_mass)

    def __eq__(self, other):
        if not isinstance(other, AlgebraElement):
            return NotImplemented
        if self.basis != other.basis or set(self.coeffs) != set(other.coeffs):
            return False
        return all(self.coeffs[k] == other.coeffs[k] for k in self.coeffs)

    def __repr__(self):
        return f"AlgebraElement({len(self.coeffs)} terms, backend={self.backend})"

    # -- linear ops ---------------------------------------------------------

    def add(self, other: "AlgebraElement") -> "AlgebraElement":
        _check_bases(self, other)
        backend = EXACT if self.backend == other.backend == EXACT else FLOAT
        out = {}
        for lam in set(self.coeffs) | set(other.coeffs):
            v = _coerce(self[lam], backend) + _coerce(other[lam], backend)
            if not coeff_is_zero(v):
                out[lam] = v
        return AlgebraElement(self.basis, out, backend,
                              _min_trunc(self.truncation, other.truncation),
                              self.dropped_mass + other.dropped_mass, _trusted=True)

    def scale(self, c) -> "AlgebraElement":
        backend = self.backend
        if backend == EXACT and isinstance(c, complex):
            backend = FLOAT
        cc = _coerce(c, backend)
        out = {}
        for lam, v in self.coeffs.items():
            nv = _coerce(v, backend) * cc
            if not coeff_is_zero(nv):
                out[lam] = nv
        return AlgebraElement(self.basis, out, backend, self.truncation,
                              self.dropped_mass, _trusted=True)

    def negate(self) -> "AlgebraElement":
        return self.scale(-1)

    # -- serialization ------------------------------------------------------

    def to_json(self) -> dict:
        entries = []
        for lam in self.support():
            v = self.coeffs[lam]
            if self.backend == EXACT:
                entry = {"element": lam.to_json(),
                         "re": format_frac(v.re), "im": format_frac(v.im)}
            else:
                entry = {"element": lam.to_json(), "re": v.real, "im": v.imag}
            entries.append(entry)
        return {"basis": self.basis.to_json(), "coeffs": entries,
                "truncation": self.truncation, "backend": self.backend}

    @classmethod
    def from_json(cls, data: dict, basis: Optional[SemigroupBasis] = None) -> "AlgebraElement":
        try:
            if basis is None:
                basis = SemigroupBasis.from_json(data["basis"])
            backend = data.get("backend", FLOAT)
            coeffs = {}
            for entry in data["coeffs"]:
                lam = SemigroupElement.from_json(basis, entry["element"])
                re, im = entry["re"], entry["im"]
                if backend == EXACT:
                    v = QC(parse_frac(re) if isinstance(re, str) else Fraction(re),
                           parse_frac(im) if isinstance(im, str) else Fraction(im))
                else:
                    v = complex(float(re), float(im))
                if lam in coeffs:
                    raise ValidationError("duplicate support element in JSON")
                coeffs[lam] = v
            return cls(basis, coeffs, backend, data.get("truncation"))
        except (KeyError, TypeError, ValueError) as e:
            raise ValidationError(f"malformed algebra element JSON: {e}") from e


def _check_bases(a: AlgebraElement, b: AlgebraElement):
    if a.basis is not b.basis and a.basis != b.basis:
        raise BasisMismatchError("operands over different bases")


def _min_trunc(t1, t2):
    if t1 is None:
        return t2
    if t2 is None:
        return t1
    return min(t1, t2)


def unit(basis: SemigroupBasis, backend: str = FLOAT) -> AlgebraElement:
    """Convolution identity eps = delta at lambda = 0."""
    return AlgebraElement(basis, {basis.zero(): 1}, backend)


def delta(basis: SemigroupBasis, lam: SemigroupElement, value=1,
          backend: str = FLOAT) -> AlgebraElement:
    return AlgebraElement(basis, {lam: value}, backend)


def from_coeffs(basis: SemigroupBasis, pairs, backend: str = FLOAT,
                truncation=None) -> AlgebraElement:
    return AlgebraElement(basis, dict(pairs), backend, truncation)


# -- core operations --------------------------------------------------------

def convolve(a: AlgebraElement, b: AlgebraElement) -> AlgebraElement:
    """(a*b)(lambda) = sum_{lambda'+lambda''=lambda} a(lambda') b(lambda'').

    Finite supports make the sum finite.  If either operand declares a
    truncation, products beyond min(T_a, T_b) are dropped and the dropped
    mass (sum of |a||b| over dropped pairs) is recorded in metadata.
    """
    _check_bases(a, b)
    backend = EXACT if a.backend == b.backend == EXACT else FLOAT
    T = _min_trunc(a.truncation, b.truncation)
    out: dict = {}
    dropped = a.dropped_mass + b.dropped_mass
    eps = 0.0 if T is None else 1e-12 * (1.0 + abs(T))
    for la, va in a.coeffs.items():
        va = _coerce(va, backend)
        ma = la.l1()
        for lb, vb in b.coeffs.items():
            if T is not None and ma + lb.l1() > T + eps:
                dropped += coeff_abs(va) * coeff_abs(vb)
                continue
            lam = la + lb
            prod = va * _coerce(vb, backend)
            cur = out.get(lam)
            out[lam] = prod if cur is None else cur + prod
    out = {k: v for k, v in out.items() if not coeff_is_zero(v)}
    return AlgebraElement(a.basis, out, backend, T, dropped, _trusted=True)


def weighted_norm(a: AlgebraElement, w: Optional[WeightFn] = None) -> float:
    """||a||_w = sum |a(lambda)| w(lambda)   (float; norms are analysis-grade)."""
    if w is None:
        w = weight_one()
    return sum(coeff_abs(v) * w.eval(lam) for lam, v in a.coeffs.items())


@dataclass
class TailBound:
    cutoff: float
    bound: float
    weight: WeightFn


def evaluate_series(a: AlgebraElement, s, w: Optional[WeightFn] = None,
                    ell: Optional[float] = None):
    """Partial sum sum_lambda a(lambda) exp(-lambda . s) plus a tail bound.

    s: complex scalar (r = 1) or sequence of r complex numbers.  The tail
    bound (1/w(ell)) sum_{|lambda|_1 >= ell} |a| w is valid on Re s >= 0 and
    omitted (None) otherwise.
    """
    sv = _s_vector(a.basis, s)
    total = 0j
    for lam in a.support():
        total += coeff_to_complex(a.coeffs[lam]) * _char_exp(lam, sv)
    tail = None
    if all(z.real >= 0 for z in sv):
        if w is None:
            w = weight_one()
        if ell is None:
            ell = a.truncation if a.truncation is not None else max(
                (lam.l1() for lam in a.coeffs), default=0.0)
        mass = sum(coeff_abs(v) * w.eval(lam) for lam, v in a.coeffs.items()
                   if lam.l1() >= ell - 1e-12)
        tail = TailBound(cutoff=float(ell), bound=mass / w.eval_mag(float(ell)), weight=w)
    return total, tail


def _s_vector(basis: SemigroupBasis, s):
    if isinstance(s, (int, float, complex)):
        sv = (complex(s),) * basis.r if basis.r == 1 else None
        if sv is None:
            raise ValidationError(f"s must have {basis.r} coordinates")
        return sv
    sv = tuple(complex(z) for z in s)
    if len(sv) != basis.r:
        raise ValidationError(f"s must have {basis.r} coordinates")
    return sv


def _char_exp(lam: SemigroupElement, sv) -> complex:
    """exp(-lambda . s) via the embedded value; shared with character eval."""
    v = lam.embedded_value()
    acc = 0j
    for x, z in zip(v, sv):
        acc += x * z
    return cmath.exp(-acc)


# -- inversion --------------------------------------------------------------

@dataclass
class NeumannCertificate:
    q: float
    terms_used: int
    tail_bound: float
    residual_norm: float
    weight: WeightFn


def neumann_invert(a: AlgebraElement, w: Optional[WeightFn] = None,
                   tol: float = 1e-12, max_terms: int = 10_000):
    """Inverse via the geometric series around a(0), with certified tail.

    Requires q = ||a - a(0) eps||_w / |a(0)| < 1.  Truncates after J terms
    once the geometric tail q^(J+1) / ((1-q) |a(0)|) < tol.  Returns
    (element, NeumannCertificate).
    """
    if w is None:
        w = weight_one()
    a0 = a.constant_term()
    if coeff_is_zero(a0):
        raise SingularElementError("constant term vanishes; no inverse in the algebra")
    rest = a.add(unit(a.basis, a.backend).scale(a0).negate())  # a - a(0) eps
    q = weighted_norm(rest, w) / coeff_abs(a0)
    if q >= 1.0:
        raise NeumannInapplicableError(q)
    inv_a0 = _invert_scalar(a0, a.backend)
    # b = (1/a0) sum_j u^{*j},  u = eps - a / a0
    u = rest.scale(inv_a0).negate()
    term = unit(a.basis, a.backend)
    acc = term
    tail = q / (1.0 - q)  # bound for sum_{j>J} q^j at J=0
    J = 0
    while tail / coeff_abs(a0) >= tol:
        J += 1
        if J > max_terms:
            raise CapExceededError(f"Neumann series needs more than {max_terms} terms")
        term = convolve(term, u)
        acc = acc.add(term)
        tail *= q
    b = acc.scale(inv_a0)
    residual = weighted_norm(convolve(a, b).add(unit(a.basis, b.backend).negate()), w)
    cert = NeumannCertificate(q=q, terms_used=J, tail_bound=tail / coeff_abs(a0),
                              residual_norm=residual, weight=w)
    return b, cert


def _invert_scalar(v, backend):
    if backend == EXACT:
        return QC(1) / QC.from_value(v)
    return 1.0 / coeff_to_complex(v)


def graded_invert(a: AlgebraElement, truncation: float,
                  cap: int = 200_000) -> AlgebraElement:
    """Inverse by recursion in increasing |lambda|_1 over the support monoid.

    b(0) = 1/a(0); for each reachable lambda (a sum of support elements with
    |lambda|_1 <= truncation, enumerated in increasing magnitude with
    lexicographic tie-break),
        b(lambda) = -(1/a(0)) sum_{lambda'+lambda''=lambda, lambda''!=lambda}
                     a(lambda') b(lambda'').
    Contributions are pushed forward from each determined b(lambda'') over
    the magnitude-sorted support, with early break at the cutoff, so the
    cost is the number of reachable pairs rather than |support| x |monoid|.
    Exact in the rational backend.
    """
    a0 = a.constant_term()
    if coeff_is_zero(a0):
        raise SingularElementError("constant term vanishes; no inverse in the algebra")
    inv_a0 = _invert_scalar(a0, a.backend)
    zero = a.basis.zero()
    support = [(lam, v) for lam, v in a.coeffs.items() if not lam.is_zero()]
    if not support:
        return AlgebraElement(a.basis, {zero: inv_a0}, a.backend, truncation, _trusted=True)
    support.sort(key=lambda kv: kv[0].sort_key())
    elements = enumerate_monoid([lam for lam, _ in support], truncation, cap)
    eps = 1e-9 * (1.0 + abs(truncation))

    acc: dict = {}
    b: dict = {zero: inv_a0}
    for lam in elements:
        if lam.is_zero():
            blam = inv_a0
        else:
            s = acc.get(lam)
            if s is None:
                continue  # not reachable as support-sum (cannot happen by construction)
            blam = -(inv_a0 * s)
            b[lam] = blam
        m = lam.l1()
        for la, va in support:
            if m + la.l1() > truncation + eps:
                break
            nu = lam + la
            prod = va * blam
            cur = acc.get(nu)
            acc[nu] = prod if cur is None else cur + prod
    out = {k: v for k, v in b.items() if not coeff_is_zero(v)}
    return AlgebraElement(a.basis, out, a.backend, truncation, _trusted=True)


# -- invertibility witness --------------------------------------------------

@dataclass(frozen=True)
class GridSpec:
    sigma_max: float = 10.0
    t_max: float = 30.0
    n_sigma: int = 40
    n_t: int = 120
    disk_step: float = 0.02
    disk_boundary: int = 512


@dataclass
class WitnessReport:
    min_modulus: float
    argmin_s: object
    certified: bool
    lower_bound: Optional[float] = None
    lipschitz: Optional[float] = None
    mesh: Optional[float] = None
    note: str = ""


def invertibility_witness(a: AlgebraElement, grid: Optional[GridSpec] = None) -> WitnessReport:
    """Numeric evidence that 0 is outside the closure of the series' range.

    General case: min |a~(s)| over a rectangle grid in the closed right
    half-plane (evidence only).  For a single-generator free basis the series
    is a polynomial in z = exp(-beta s) on the closed unit disk; a grid with
    mesh h and Lipschitz constant L = sum n |a_n| gives the rigorous bound
    min_grid - L*h, and a positive bound certifies invertibility.
    """
    grid = grid or GridSpec()
    if a.basis.mode == "free" and len(a.basis.generators) == 1:
        return _disk_witness(a, grid)
    best = math.inf
    best_s = None
    import numpy as np
    sig = np.linspace(0.0, grid.sigma_max, grid.n_sigma)
    ts = np.linspace(-grid.t_max, grid.t_max, grid.n_t)
    for si in sig:
        for ti in ts:
            s = complex(si, ti)
            sv = (s,) * a.basis.r
            val = sum(coeff_to_complex(v) * _char_exp(lam, sv)
                      for lam, v in a.coeffs.items())
            if abs(val) < best:
                best, best_s = abs(val), s
    return WitnessReport(min_modulus=best, argmin_s=best_s, certified=False,
                         note="half-plane grid evidence (no certificate for r > 1 "
                              "or multi-generator bases)")


def _disk_witness(a: AlgebraElement, grid: GridSpec) -> WitnessReport:
    gid = a.basis.generators[0].id
    coeffs: dict[int, complex] = {}
    for lam, v in a.coeffs.items():
        n = dict(lam.exponents).get(gid, 0)
        coeffs[n] = coeffs.get(n, 0j) + coeff_to_complex(v)
    degs = sorted(coeffs)

    def p(z: complex) -> complex:
        return sum(coeffs[n] * z ** n for n in degs)

    L = sum(n * abs(coeffs[n]) for n in degs)
    h = grid.disk_step
    best = math.inf
    best_z = None
    k = int(math.ceil(1.0 / h))
    for i in range(-k, k + 1):
        for j in range(-k, k + 1):
            z = complex(i * h, j * h)
            if abs(z) > 1.0:
                z = z / abs(z)
            v = abs(p(z))
            if v < best:
                best, best_z = v, z
    for m in range(grid.disk_boundary):
        z = cmath.exp(2j * math.pi * m / grid.disk_boundary)
        v = abs(p(z))
        if v < best:
            best, best_z = v, z
    mesh = h * math.sqrt(2.0)
    lower = best - L * mesh
    return WitnessReport(min_modulus=best, argmin_s=best_z, certified=lower > 0.0,
                         lower_bound=lower, lipschitz=L, mesh=mesh,
                         note="closed-unit-disk certificate for the single-generator case")


# -- analytic composition ---------------------------------------------------

@dataclass(frozen=True)
class PowerSeries:
    """f(z) = sum_k f_k (z - center)^k with convergence radius `radius`."""
    center: complex
    radius: float
    coeff_list: tuple = ()
    kind: str = "coeffs"  # coeffs | exp | reciprocal

    def coeff(self, k: int) -> complex:
        if self.kind == "exp":
            return 1.0 / math.factorial(k)
        if self.kind == "reciprocal":
            c = self.center
            return (-1) ** k / c ** (k + 1)
        return self.coeff_list[k] if k < len(self.coeff_list) else 0.0

    def finite(self) -> bool:
        return self.kind == "coeffs"

    @classmethod
    def from_coeffs(cls, coeffs, center=0.0, radius=math.inf) -> "PowerSeries":
        return cls(complex(center), float(radius), tuple(complex(c) for c in coeffs))

    @classmethod
    def exp(cls, radius: float) -> "PowerSeries":
        """exp around 0; any finite radius > ||a||_w works (entire function)."""
        radius = float(radius)
        if not math.isfinite(radius):
            raise PreconditionError("choose a finite working radius for exp")
        return cls(0j, radius, (), "exp")

    @classmethod
    def reciprocal(cls, center: complex) -> "PowerSeries":
        """1/z around `center`; radius |center|."""
        c = complex(center)
        if c == 0:
            raise PreconditionError("reciprocal series needs a nonzero center")
        return cls(c, abs(c), (), "reciprocal")

    @classmethod
    def from_json(cls, data: dict) -> "PowerSeries":
        try:
            kind = data["kind"]
            if kind == "exp":
                return cls.exp(float(data["radius"]))
            if kind == "reciprocal":
                return cls.reciprocal(complex(data["center"]["re"], data["center"]["im"]))
            if kind == "coeffs":
                coeffs = [complex(c["re"], c["im"]) for c in data["coeffs"]]
                center = data.get("center", {"re": 0.0, "im": 0.0})
                return cls.from_coeffs(coeffs, complex(center["re"], center["im"]),
                                       float(data.get("radius", math.inf)))
        except (KeyError, TypeError, ValueError) as e:
            raise ValidationError(f"malformed power series JSON: {e}") from e
        raise ValidationError(f"unknown power series kind {data.get('kind')!r}")


@dataclass
class CompositionCertificate:
    q: float
    radius: float
    terms_used: int
    tail_bound: float


def compose_series(f: PowerSeries, a: AlgebraElement, w: Optional[WeightFn] = None,
                   tol: float = 1e-12, max_terms: int = 2_000):
    """c = sum_k f_k (a - c0 eps)^{*k}, truncated by a geometric tail bound.

    Requires q = ||a - c0 eps||_w < radius.  The tail uses the majorant
    C_K = max_{k<=K} |f_k| R^k (exact for polynomial f, Cauchy-estimate
    shaped for analytic f): sum_{k>K} |f_k| q^k <= C_K (q/R)^{K+1}/(1-q/R).
    Returns (element, CompositionCertificate).
    """
    if w is None:
        w = weight_one()
    u = a.add(unit(a.basis, a.backend).scale(f.center).negate())
    q = weighted_norm(u, w)
    if not q < f.radius:
        raise PreconditionError(
            f"composition outside convergence radius: ||a - c0||_w = {q} >= {f.radius}"
            f" (gap {q - f.radius})")
    ratio = q / f.radius if math.isfinite(f.radius) else 0.0
    C = _series_majorant(f)
    acc = unit(a.basis, a.backend).scale(f.coeff(0))
    power = unit(a.basis, a.backend)
    K = 0
    while True:
        if f.finite():
            # polynomial: sum every term, tail is exactly zero
            if K >= max(len(f.coeff_list) - 1, 0):
                tail = 0.0
                break
        else:
            tail = C * ratio ** (K + 1) / (1.0 - ratio) if ratio > 0 else 0.0
            if tail < tol:
                break
        K += 1
        if K > max_terms:
            raise CapExceededError(f"composition needs more than {max_terms} terms")
        power = convolve(power, u)
        fk = f.coeff(K)
        if fk != 0:
            acc = acc.add(power.scale(fk))
    return acc, CompositionCertificate(q=q, radius=f.radius, terms_used=K, tail_bound=tail)


def _series_majorant(f: PowerSeries) -> float:
    """sup_k |f_k| radius^k — finite per kind, making the geometric tail valid."""
    if f.kind == "reciprocal":
        return 1.0 / abs(f.center)
    if f.kind == "exp":
        # radius^k / k! peaks near k = radius and decreases beyond
        top = int(math.ceil(f.radius)) + 2
        return max(f.radius ** k / math.factorial(k) for k in range(top))
    if not math.isfinite(f.radius):
        return 0.0  # finite coefficient list: tail handled exactly
    return max((abs(c) * f.radius ** k for k, c in enumerate(f.coeff_list)), default=0.0)


# -- shared helper for the disk minimum (also used by the multiplicative layer)

def min_modulus_on_disk(poly_coeffs, step: float = 0.02, boundary: int = 512):
    """(min |p(z)|, argmin, certified lower bound) over the closed unit disk."""
    coeffs = [complex(c) for c in poly_coeffs]

    def p(z: complex) -> complex:
        acc = 0j
        zp = 1.0 + 0j
        for c in coeffs:
            acc += c * zp
            zp *= z
        return acc

    L = sum(n * abs(c) for n, c in enumerate(coeffs))
    best, best_z = math.inf, None
    k = int(math.ceil(1.0 / step))
    for i in range(-k, k + 1):
        for j in range(-k, k + 1):
            z = complex(i * step, j * step)
            if abs(z) > 1.0:
                z = z / abs(z)
            v = abs(p(z))
            if v < best:
                best, best_z = v, z
    for m in range(boundary):
        z = cmath.exp(2j * math.pi * m / boundary)
        v = abs(p(z))
        if v < best:
            best, best_z = v, z
    return best, best_z, best - L * step * math.sqrt(2.0)
