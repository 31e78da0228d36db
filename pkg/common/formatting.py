"""Text formatting for report fields and symbolic forms"""


def format_real(value, digits=6):
    """
    Format a real number compactly: integers without a decimal point.
    Returns: '3', '-0.5', '1.41421'
    """
    try:
        float_value = float(value)
    except (ValueError, TypeError):
        return str(value)
    if float_value == 0.0:
        return '0'
    rounded = round(float_value)
    if abs(float_value - rounded) < 10.0 ** (-digits):
        return str(int(rounded))
    return f'{float_value:.{digits}g}'


def format_complex(value, digits=6):
    """
    Format a complex number for symbolic forms.
    Returns: '2', 'i', '-3i', '5-2i', '0.5+0.866025i'
    """
    value = complex(value)
    real = format_real(value.real, digits)
    imag = format_real(value.imag, digits)
    if imag == '0':
        return real
    if imag == '1':
        imag_part = 'i'
    elif imag == '-1':
        imag_part = '-i'
    else:
        imag_part = f'{imag}i'
    if real == '0':
        return imag_part
    sign = '' if imag_part.startswith('-') else '+'
    return f'{real}{sign}{imag_part}'


def format_coefficient(value, digits=6):
    """
    Format a coefficient in front of a monomial.
    Returns: '' for 1, '-' for -1, '(5-2i)' for complex values, '3' otherwise
    """
    text = format_complex(value, digits)
    if text == '1':
        return ''
    if text == '-1':
        return '-'
    if ('+' in text[1:] or '-' in text[1:]) and 'e' not in text:
        return f'({text})'
    return text


def truncate_chars(value, length):
    """
    Truncate a string to a specified number of characters.
    Usage: truncate_chars(form, 40)
    """
    try:
        length = int(length)
    except (ValueError, TypeError):
        return value

    if value is None:
        return ''

    value = str(value)
    if len(value) <= length:
        return value

    return value[:length] + '...'
