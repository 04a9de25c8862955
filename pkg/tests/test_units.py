import pytest

from vdmn import parse_unit
from vdmn.units import DIMENSIONLESS, PERCENT


def test_simple_symbol():
    eur = parse_unit("EUR")
    assert eur.text() == "EUR"
    assert eur.same_dimension(parse_unit("EUR"))
    assert not eur.same_dimension(parse_unit("piece"))


def test_percent_prints_distinctly_but_is_dimensionless():
    assert parse_unit("%") == PERCENT
    assert PERCENT != DIMENSIONLESS
    assert PERCENT.text() == "%"
    assert DIMENSIONLESS.text() == "1"
    # the percent flag is presentational; a percentage is still a ratio
    assert PERCENT.same_dimension(DIMENSIONLESS)
    assert not PERCENT.same_dimension(parse_unit("EUR"))


def test_quotient_and_product():
    rate = parse_unit("EUR/piece")
    volume = parse_unit("piece")
    assert rate.multiply(volume).same_dimension(parse_unit("EUR"))
    assert parse_unit("EUR").divide(volume).same_dimension(rate)


def test_exponents():
    area = parse_unit("m^2")
    assert area.same_dimension(parse_unit("m").multiply(parse_unit("m")))
    accel = parse_unit("m/s^2")
    assert accel.multiply(parse_unit("s^2")).same_dimension(parse_unit("m"))


def test_division_cancels_to_dimensionless():
    ratio = parse_unit("EUR").divide(parse_unit("EUR"))
    assert ratio.same_dimension(DIMENSIONLESS)


def test_one_is_dimensionless():
    assert parse_unit("1").same_dimension(DIMENSIONLESS)


def test_text_round_trip():
    for text in ("EUR", "piece", "EUR/piece", "m^2", "kg*m/s^2", "%"):
        unit = parse_unit(text)
        assert parse_unit(unit.text()) == unit


@pytest.mark.parametrize("bad", ["", "   ", "EUR//piece", "EUR^x", "*piece"])
def test_malformed_units_raise(bad):
    with pytest.raises(ValueError):
        parse_unit(bad)
