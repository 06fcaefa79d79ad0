import datetime as dt

import numpy as np
import pytest

from checksynth.amounts import amount_to_words, courtesy_amount, fake_fields

from oracles import courtesy_to_cents, spell_dollars, words_to_cents


@pytest.mark.parametrize("cents, text", [
    (0, "Zero and 00/100"),
    (100, "One and 00/100"),
    (123456, "One thousand two hundred thirty-four and 56/100"),
    (7, "Zero and 07/100"),
    (2000000, "Twenty thousand and 00/100"),
    (99999999999, "Nine hundred ninety-nine million nine hundred ninety-nine thousand "
                  "nine hundred ninety-nine and 99/100"),
])
def test_known_amounts(cents, text):
    assert amount_to_words(cents) == text


def test_matches_digit_group_oracle():
    rng = np.random.default_rng(0)
    for cents in [123456, *rng.integers(0, 10 ** 11, size=2000).tolist()]:
        expected = spell_dollars(cents // 100)
        expected = f"{expected[0].upper()}{expected[1:]} and {cents % 100:02d}/100"
        assert amount_to_words(cents) == expected


def test_round_trip_through_parser():
    rng = np.random.default_rng(1)
    for cents in rng.integers(0, 10 ** 6, size=10_000).tolist():
        assert words_to_cents(amount_to_words(cents)) == cents


@pytest.mark.parametrize("bad", [-1, 10 ** 11])
def test_out_of_range(bad):
    with pytest.raises(ValueError):
        amount_to_words(bad)


def test_courtesy_format():
    assert courtesy_amount(100) == "$1.00"
    assert courtesy_amount(123456) == "$1234.56"
    assert courtesy_amount(5) == "$0.05"


DATES = (dt.date(2021, 3, 1), dt.date(2021, 3, 31))


def test_singleton_pool_and_degenerate_amount():
    rng = np.random.default_rng(0)
    for _ in range(20):
        payee, date, courtesy, legal = fake_fields(rng, DATES, (100, 100), ["Only Name"])
        assert payee == "Only Name"
        assert (courtesy, legal) == ("$1.00", "One and 00/100")


def test_courtesy_and_legal_agree():
    rng = np.random.default_rng(9)
    for _ in range(1000):
        _, _, courtesy, legal = fake_fields(rng, DATES, (0, 10 ** 8), ["A", "B"])
        assert courtesy_to_cents(courtesy) == words_to_cents(legal)


def test_dates_in_range_and_formats():
    rng = np.random.default_rng(2)
    seen = set()
    for _ in range(500):
        date = fake_fields(rng, DATES, (1, 2), ["A"])[1]
        parsed = dt.datetime.strptime(date, "%m/%d/%Y").date()
        assert DATES[0] <= parsed <= DATES[1]
        seen.add(parsed)
    assert len(seen) == 31
    date = fake_fields(rng, ("2021-03-05", "2021-03-05"), (1, 2), ["A"], "DD.MM.YYYY")[1]
    assert date == "05.03.2021"


@pytest.mark.parametrize("kwargs", [
    dict(name_pool=[]),
    dict(date_range=(dt.date(2022, 1, 2), dt.date(2022, 1, 1))),
    dict(amount_range=(500, 100)),
    dict(date_format="YYYY-MM-DD"),
])
def test_fake_fields_errors(kwargs):
    args = dict(date_range=DATES, amount_range=(1, 10), name_pool=["A"])
    args.update(kwargs)
    with pytest.raises(ValueError):
        fake_fields(np.random.default_rng(0), **args)
