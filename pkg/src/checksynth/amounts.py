"""Fake check field contents: payee, date, courtesy and legal amounts."""

from __future__ import annotations

import datetime as dt
from typing import Sequence

import numpy as np

MAX_CENTS = 10 ** 11  # exclusive; up to $999,999,999.99

_ONES = ["zero", "one", "two", "three", "four", "five", "six", "seven", "eight", "nine",
         "ten", "eleven", "twelve", "thirteen", "fourteen", "fifteen", "sixteen",
         "seventeen", "eighteen", "nineteen"]
_TENS = ["", "", "twenty", "thirty", "forty", "fifty", "sixty", "seventy", "eighty", "ninety"]
_SCALES = [(10 ** 6, "million"), (10 ** 3, "thousand")]

DATE_FORMATS = {"MM/DD/YYYY": "%m/%d/%Y", "DD.MM.YYYY": "%d.%m.%Y"}

DEFAULT_NAMES = [
    "Alice Moreno", "Bilal Chaudhry", "Carmen Ortiz", "Daniel Weber", "Elena Rossi",
    "Farid Haddad", "Grace Kim", "Hannah Schulz", "Ivan Petrov", "Julia Novak",
    "Kenji Sato", "Laura Becker", "Marco Bianchi", "Nadia Rahman", "Omar Siddiqui",
    "Priya Nair", "Quentin Lefevre", "Rosa Alvarez", "Samuel Okafor", "Tara Singh",
    "Umar Farooq", "Vera Lindqvist", "William Hart", "Ximena Ruiz", "Yusuf Demir",
    "Zoe Fischer", "Ahmed Karim", "Beatriz Costa", "Chen Wei", "Dana Cohen",
]


def _below_thousand(n: int) -> list[str]:
    words = []
    hundreds, rest = divmod(n, 100)
    if hundreds:
        words += [_ONES[hundreds], "hundred"]
    if rest >= 20:
        tens, ones = divmod(rest, 10)
        words.append(_TENS[tens] + (f"-{_ONES[ones]}" if ones else ""))
    elif rest:
        words.append(_ONES[rest])
    return words


def amount_to_words(cents: int) -> str:
    """Legal-line wording, e.g. 123456 -> "One thousand two hundred thirty-four and 56/100"."""
    if isinstance(cents, bool) or int(cents) != cents:
        raise TypeError("cents must be an integer")
    cents = int(cents)
    if not 0 <= cents < MAX_CENTS:
        raise ValueError(f"amount {cents} cents outside [0, {MAX_CENTS})")
    dollars, rem = divmod(cents, 100)
    if dollars == 0:
        words = ["zero"]
    else:
        words = []
        for value, name in _SCALES:
            group, dollars = divmod(dollars, value)
            if group:
                words += _below_thousand(group) + [name]
        words += _below_thousand(dollars)
    text = " ".join(words)
    return f"{text[0].upper()}{text[1:]} and {rem:02d}/100"


def courtesy_amount(cents: int) -> str:
    dollars, rem = divmod(int(cents), 100)
    return f"${dollars}.{rem:02d}"


def _as_date(value) -> dt.date:
    if isinstance(value, dt.date):
        return value
    return dt.date.fromisoformat(str(value))


def fake_fields(rng: np.random.Generator, date_range, amount_range: Sequence[int],
                name_pool: Sequence[str], date_format: str = "MM/DD/YYYY"):
    """Draw (payee, date, courtesy amount, legal amount) strings.

    Date and amount are uniform over their inclusive ranges; the courtesy and
    legal strings encode the same number of cents.
    """
    if not name_pool:
        raise ValueError("name pool is empty")
    start, end = (_as_date(d) for d in date_range)
    if end < start:
        raise ValueError(f"inverted date range {start}..{end}")
    lo, hi = (int(v) for v in amount_range)
    if lo < 0 or hi < lo or hi >= MAX_CENTS:
        raise ValueError(f"invalid amount range [{lo}, {hi}]")
    if date_format not in DATE_FORMATS:
        raise ValueError(f"unknown date format {date_format!r}; choose from {sorted(DATE_FORMATS)}")

    payee = str(name_pool[int(rng.integers(len(name_pool)))])
    day = start + dt.timedelta(days=int(rng.integers(0, (end - start).days + 1)))
    cents = int(rng.integers(lo, hi + 1))
    return payee, day.strftime(DATE_FORMATS[date_format]), courtesy_amount(cents), amount_to_words(cents)
