"""Unit conversions and the fixed float format used by every export.

Internally everything is SI with frequencies as angular frequencies (rad/s).
Files and terminal output carry ordinary frequencies with the unit in the name.
"""

import math

TWO_PI = 2.0 * math.pi

MHZ = 1e6
GHZ = 1e9


def mhz_to_angular(value_mhz: float) -> float:
    """Ordinary frequency in MHz -> angular frequency in rad/s."""
    return TWO_PI * value_mhz * MHZ


def ghz_to_angular(value_ghz: float) -> float:
    return TWO_PI * value_ghz * GHZ


def hz_to_angular(value_hz: float) -> float:
    return TWO_PI * value_hz


def angular_to_mhz(omega: float) -> float:
    """Angular frequency in rad/s -> ordinary frequency in MHz."""
    return omega / TWO_PI / MHZ


def angular_to_ghz(omega: float) -> float:
    return omega / TWO_PI / GHZ


def format_float(value: float) -> str:
    """12 significant digits, scientific notation. Negative zero prints as zero."""
    value = float(value)
    if value == 0.0:
        value = 0.0
    return f"{value:.11e}"
