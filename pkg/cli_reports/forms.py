"""
Validation of bundle spec JSON.

{"tau": [re, im], "type": "repr" | "sum",
 "theta": [["rat", p, q] | ["irr", x], ...],
 "b": [[re, im], [re, im]], "degrees": [d1, d2]}

Messages carry the JSON path of the offending value, e.g. ``theta[1][2]``.
"""
import math
from numbers import Integral, Real

from django import forms
from django.core.exceptions import ValidationError

from bundle_algebra.angles import AngleParam

SPEC_TYPES = [('repr', 'repr'), ('sum', 'sum')]


def _is_real(value):
    return isinstance(value, Real) and not isinstance(value, bool) and math.isfinite(value)


def _is_integer(value):
    return isinstance(value, Integral) and not isinstance(value, bool)


def parse_pair(value, path=''):
    if not isinstance(value, (list, tuple)) or len(value) != 2 or not all(_is_real(v) for v in value):
        raise ValidationError(f'{path}: expected [re, im] with two finite numbers, got {value!r}')
    return complex(value[0], value[1])


def parse_angle(value, path=''):
    if isinstance(value, (list, tuple)) and value and value[0] == 'rat':
        if len(value) != 3 or not _is_integer(value[1]) or not _is_integer(value[2]):
            raise ValidationError(f'{path}: expected ["rat", p, q] with integers p, q, got {value!r}')
        if value[2] <= 0:
            raise ValidationError(f'{path}[2]: denominator must be positive, got {value[2]}')
        return AngleParam.rational(value[1], value[2])
    if isinstance(value, (list, tuple)) and value and value[0] == 'irr':
        if len(value) != 2 or not _is_real(value[1]):
            raise ValidationError(f'{path}: expected ["irr", x] with a finite number x, got {value!r}')
        return AngleParam.irrational(value[1])
    raise ValidationError(f'{path}: expected ["rat", p, q] or ["irr", x], got {value!r}')


class PairField(forms.Field):
    """[re, im] -> complex"""

    def to_python(self, value):
        if value in self.empty_values:
            return None
        return parse_pair(value)


class ListField(forms.Field):
    """A JSON list whose items are parsed by ``item``; errors name the index."""

    def __init__(self, item, **kwargs):
        super().__init__(**kwargs)
        self.item = item

    def to_python(self, value):
        if value in self.empty_values:
            return []
        if not isinstance(value, (list, tuple)):
            raise ValidationError(f': expected a list, got {value!r}')
        return [self.item(entry, f'[{index}]') for index, entry in enumerate(value)]


def parse_degree(value, path=''):
    if not _is_integer(value):
        raise ValidationError(f'{path}: degree must be an integer, got {value!r}')
    return int(value)


class BundleSpecForm(forms.Form):
    tau = PairField()
    type = forms.ChoiceField(choices=SPEC_TYPES)
    theta = ListField(parse_angle)
    b = ListField(parse_pair, required=False)
    degrees = ListField(parse_degree, required=False)

    def clean_tau(self):
        tau = self.cleaned_data['tau']
        if tau.imag <= 0:
            raise ValidationError(f'[1]: Im tau must be positive, got {tau.imag}')
        return tau

    def clean(self):
        cleaned_data = super().clean()
        unknown = sorted(set(self.data) - set(self.fields))
        if unknown:
            raise ValidationError(f'unknown keys {", ".join(unknown)}')
        if self.errors:
            return cleaned_data

        theta = cleaned_data['theta']
        b = cleaned_data.get('b') or []
        degrees = cleaned_data.get('degrees') or []
        if cleaned_data['type'] == 'repr':
            if len(theta) != 2:
                self.add_error('theta', f': a representation needs 2 angles, got {len(theta)}')
            if len(b) != 2:
                self.add_error('b', f': a representation needs [b1, b2], got {len(b)} entries')
            if degrees:
                self.add_error('degrees', ': not used by a representation')
        else:
            if len(degrees) not in (1, 2):
                self.add_error('degrees', f': a sum needs 1 or 2 degrees, got {len(degrees)}')
            elif len(theta) != 2 * len(degrees):
                self.add_error('theta', f': {len(degrees)} lines need {2 * len(degrees)} angles, got {len(theta)}')
            if b:
                self.add_error('b', ': not used by a sum of lines')
        return cleaned_data

    def error_paths(self):
        """Errors as 'path: message', the path rooted at the document root."""
        messages = []
        for name, errors in self.errors.items():
            for message in errors:
                if name == '__all__':
                    messages.append(message)
                elif message.startswith(('[', ':')):
                    messages.append(f'{name}{message}')
                else:
                    messages.append(f'{name}: {message}')
        return messages
