"""
Bases of holomorphic functions of polynomial type on total spaces.

A function of polynomial type expands as sum c_{p,q}(z) xi1^p xi2^q; each
coefficient is a section of L1^-p (x) L2^-q (Types I and II) or, for Type III,
a polynomial dictated by the representation. The closed forms below list the
admissible (p, q) with fiber degree p + q <= d.
"""
import logging
from dataclasses import dataclass, field

from bundle_algebra.angles import all_rational, as_angle, common_order
from bundle_algebra.bundles import TypeI, TypeII, TypeIII, is_split_representation
from bundle_algebra.line_bundles import ah_power, ah_tensor, h0_line, is_trivial
from common.exceptions import BundleError

from .polynomials import format_polynomial, monomial, sheared_power

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Monomial:
    p: int
    q: int
    section_dim: int
    form: str
    kind: str
    polynomial: tuple = None

    @property
    def degree(self):
        return self.p + self.q

    @property
    def coefficients(self):
        """{(j, a, b): c} when the element is a polynomial in (z, z1, z2), else None."""
        return None if self.polynomial is None else dict(self.polynomial)

    def to_dict(self):
        return {'p': self.p, 'q': self.q, 'dim': self.section_dim, 'form': self.form}


def polynomial_monomial(p, q, poly, kind):
    return Monomial(p, q, 1, format_polynomial(poly), kind, tuple(sorted(poly.items())))


@dataclass
class BasisReport:
    degree: int
    monomials: list = field(default_factory=list)

    @property
    def total_dim(self):
        return sum(m.section_dim for m in self.monomials)

    def dims(self):
        return {(m.p, m.q): m.section_dim for m in self.monomials}

    def forms(self):
        return [m.form for m in self.monomials]

    def to_rows(self):
        return [m.to_dict() for m in self.monomials]


def constants_only(d):
    return BasisReport(d, [polynomial_monomial(0, 0, monomial(0, 0, 0), 'constant')])


def _check_degree(d):
    if int(d) != d or d < 0:
        raise BundleError(f'Degree bound must be a nonnegative integer, got {d!r}')
    return int(d)


def fiber_pairs(d):
    """(p, q) with p + q <= d, by total degree then p."""
    for total in range(d + 1):
        for p in range(total, -1, -1):
            yield p, total - p


def basis_typeI(L1, L2, d):
    d = _check_degree(d)
    if L1.degree != 0 or L2.degree != 0:
        raise BundleError('Type I bases need two degree 0 lines')
    report = BasisReport(d)
    for p, q in fiber_pairs(d):
        coefficient_bundle = ah_tensor(ah_power(L1, -p), ah_power(L2, -q))
        if h0_line(coefficient_bundle):
            report.monomials.append(polynomial_monomial(p, q, monomial(0, p, q), 'xi'))
    return report


def basis_typeII(L1, L2, d):
    d = _check_degree(d)
    h = L1.degree
    if h <= 0 or L2.degree != -h:
        raise BundleError(f'Type II bases need deg L1 = -deg L2 > 0, got {L1.degree}, {L2.degree}')
    dual_pair = is_trivial(ah_tensor(L1, L2))
    report = BasisReport(d)
    for p, q in fiber_pairs(d):
        if p > q:
            continue
        if p == q:
            if not dual_pair:
                continue
            report.monomials.append(polynomial_monomial(p, q, monomial(0, p, q), 'xi'))
            continue
        dim = h0_line(ah_tensor(ah_power(L1, -p), ah_power(L2, -q)))
        form = f'H0(L1^-{p} L2^-{q}) xi1^{p} xi2^{q}'
        report.monomials.append(Monomial(p, q, dim, form, 'section'))
    return report


def basis_typeIII(theta1, theta2, b1, b2, tau, d):
    d = _check_degree(d)
    theta = (as_angle(theta1), as_angle(theta2))
    if not all_rational(theta):
        return constants_only(d)
    m = common_order(theta)
    report = BasisReport(d)
    if not is_split_representation(b1, b2, tau):
        for k in range(0, d + 1, m):
            report.monomials.append(polynomial_monomial(0, k, monomial(0, 0, k), 'z2'))
        return report
    for p, q in fiber_pairs(d):
        if (p + q) % m == 0:
            report.monomials.append(polynomial_monomial(p, q, sheared_power(b1, p, q), 'sheared'))
    return report


def basis_for(E, d):
    """Dispatch on the bundle type."""
    logger.debug(f'Enumerating degree <= {d} basis for Type {E.kind}')
    if isinstance(E, TypeI):
        return basis_typeI(E.first, E.second, d)
    if isinstance(E, TypeII):
        return basis_typeII(E.first, E.second, d)
    if isinstance(E, TypeIII):
        return basis_typeIII(E.theta[0], E.theta[1], E.b1, E.b2, E.tau, d)
    raise BundleError(f'No basis for {type(E).__name__}')


def _multiplicity_rows(angles):
    generators = sorted({g for angle in angles for g, _ in angle.terms})
    return [[dict(angle.terms).get(g, 0) for angle in angles] for g in generators]


def _typeI_has_nonconstant(E):
    """Some (p, q) != (0, 0), p, q >= 0 with p theta(L1) + q theta(L2) = 0 componentwise."""
    rows = []
    for first, second in zip(E.first.theta, E.second.theta):
        rows.extend(_multiplicity_rows((first, second)))
    rows = [row for row in rows if any(row)]
    if not rows:
        return True
    # irrational parts must cancel: (p, q) is orthogonal to every row
    pivot = rows[0]
    for row in rows[1:]:
        if pivot[0] * row[1] - pivot[1] * row[0] != 0:
            return False
    # kernel is spanned by (pivot[1], -pivot[0]); need a nonnegative multiple
    return pivot[1] * -pivot[0] >= 0


def has_nonconstant(E):
    if isinstance(E, TypeIII):
        return all_rational(E.theta)
    if isinstance(E, TypeII):
        return True
    if isinstance(E, TypeI):
        return _typeI_has_nonconstant(E)
    raise BundleError(f'Unknown bundle type {type(E).__name__}')
