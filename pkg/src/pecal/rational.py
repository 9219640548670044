"""Exact parsing and printing of probabilities.

Probabilities are ``Fraction`` values throughout.  Decimal literals are read
as exact decimal fractions (``0.13`` is exactly 13/100), and a fraction is
printed as a decimal only when that decimal is exact.
"""

from __future__ import annotations

from fractions import Fraction


def parse_rational(text: str) -> Fraction:
    """Parse ``7/17``, ``0.25`` or ``1`` into an exact Fraction.

    Raises ValueError on anything else (including floats like ``1e-3``).
    """
    text = text.strip()
    if "/" in text:
        num, _, den = text.partition("/")
        return Fraction(int(num), int(den))
    if "." in text:
        whole, _, digits = text.partition(".")
        if not digits or not digits.isdigit():
            raise ValueError(f"malformed decimal literal {text!r}")
        sign = -1 if whole.strip().startswith("-") else 1
        whole_part = int(whole) if whole not in ("", "-", "+") else 0
        return Fraction(whole_part) + sign * Fraction(int(digits), 10 ** len(digits))
    return Fraction(int(text))


def format_rational(value: Fraction) -> str:
    """Shortest exact decimal when one exists, ``num/den`` otherwise."""
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    den = value.denominator
    twos = 0
    while den % 2 == 0:
        den //= 2
        twos += 1
    fives = 0
    while den % 5 == 0:
        den //= 5
        fives += 1
    if den != 1:
        return f"{value.numerator}/{value.denominator}"
    places = max(twos, fives)
    scaled = abs(value.numerator) * 10**places // value.denominator
    sign = "-" if value.numerator < 0 else ""
    digits = str(scaled).rjust(places + 1, "0")
    return f"{sign}{digits[:-places]}.{digits[-places:]}"


def fraction_pair(value: Fraction) -> str:
    """``num/den`` form, used where exactness must survive a text round trip."""
    return f"{value.numerator}/{value.denominator}"
