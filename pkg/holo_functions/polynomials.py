"""
Sparse polynomials in (z, z1, z2) stored as {(j, a, b): coefficient}
for coefficient * z^j z1^a z2^b.
"""
from math import comb

import numpy as np

from common.formatting import format_coefficient

ZERO_TOLERANCE = 1e-14


def monomial(j, a, b, coefficient=1.0):
    return {(j, a, b): complex(coefficient)}


def add(first, second, factor=1.0):
    result = dict(first)
    for key, value in second.items():
        result[key] = result.get(key, 0.0) + factor * value
    return prune(result)


def prune(poly):
    return {key: value for key, value in poly.items() if abs(value) > ZERO_TOLERANCE}


def multiply(first, second):
    result = {}
    for (j1, a1, b1), c1 in first.items():
        for (j2, a2, b2), c2 in second.items():
            key = (j1 + j2, a1 + a2, b1 + b2)
            result[key] = result.get(key, 0.0) + c1 * c2
    return prune(result)


def power(poly, exponent):
    result = monomial(0, 0, 0)
    for _ in range(exponent):
        result = multiply(result, poly)
    return result


def shifted_base(translation, exponent):
    """(z + t)^exponent"""
    return {(i, 0, 0): comb(exponent, i) * complex(translation) ** (exponent - i)
            for i in range(exponent + 1)}


def sheared_power(b1, p, q):
    """(z1 - b1 z z2)^p z2^q"""
    return prune({
        (i, p - i, i + q): comb(p, i) * (-complex(b1)) ** i
        for i in range(p + 1)
    })


def substitute(poly, translation, matrix):
    """poly(z + t, R (z1, z2)) for a constant 2x2 matrix R."""
    matrix = np.asarray(matrix, dtype=complex)
    first = {(0, 1, 0): matrix[0, 0], (0, 0, 1): matrix[0, 1]}
    second = {(0, 1, 0): matrix[1, 0], (0, 0, 1): matrix[1, 1]}
    result = {}
    for (j, a, b), coefficient in poly.items():
        term = multiply(shifted_base(translation, j), multiply(power(first, a), power(second, b)))
        result = add(result, term, coefficient)
    return result


def evaluate(poly, points):
    """Evaluate at points of shape (..., 3)."""
    points = np.asarray(points, dtype=complex)
    z, z1, z2 = points[..., 0], points[..., 1], points[..., 2]
    total = np.zeros(z.shape, dtype=complex)
    for (j, a, b), coefficient in poly.items():
        total = total + coefficient * z ** j * z1 ** a * z2 ** b
    return total


def _power_text(name, exponent):
    if exponent == 0:
        return ''
    if exponent == 1:
        return name
    return f'{name}^{exponent}'


def format_polynomial(poly):
    """Readable form, highest fiber degree first: 'z1^2+z2^2', 'z1-(2-i)*z*z2'."""
    if not poly:
        return '0'
    parts = []
    for (j, a, b), coefficient in sorted(poly.items(), key=lambda item: (-item[0][1], -item[0][2], item[0][0])):
        factors = [text for text in (_power_text('z', j), _power_text('z1', a), _power_text('z2', b)) if text]
        body = '*'.join(factors)
        prefix = format_coefficient(coefficient)
        if not body:
            term = prefix if prefix not in ('', '-') else f'{prefix}1'
        elif prefix in ('', '-'):
            term = f'{prefix}{body}'
        else:
            term = f'{prefix}*{body}'
        parts.append(term)
    text = parts[0]
    for term in parts[1:]:
        text += term if term.startswith('-') else f'+{term}'
    return text
