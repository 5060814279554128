"""Small input-validation helpers shared across the package."""

from __future__ import annotations


class ValidationError(ValueError):
    """Raised when an input file, record, or parameter fails validation."""


def check_fraction(name: str, value: float) -> float:
    value = float(value)
    if not 0.0 <= value <= 1.0:
        raise ValidationError(f"{name} must be in [0, 1], got {value}")
    return value


def check_positive(name: str, value: float) -> float:
    value = float(value)
    if not value > 0.0:
        raise ValidationError(f"{name} must be > 0, got {value}")
    return value


def check_nonnegative(name: str, value: float) -> float:
    value = float(value)
    if value < 0.0:
        raise ValidationError(f"{name} must be >= 0, got {value}")
    return value


def check_choice(name: str, value: str, choices: tuple[str, ...]) -> str:
    if value not in choices:
        raise ValidationError(f"{name} must be one of {sorted(choices)}, got {value!r}")
    return value


def check_lat_lon(name: str, lat: float, lon: float) -> tuple[float, float]:
    lat, lon = float(lat), float(lon)
    if not -90.0 <= lat <= 90.0 or not -180.0 <= lon <= 180.0:
        raise ValidationError(
            f"{name}: coordinates ({lat}, {lon}) outside [-90,90]x[-180,180]"
        )
    return lat, lon
