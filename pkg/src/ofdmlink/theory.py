"""Closed-form BER references used to validate the simulator."""
from __future__ import annotations

import math

from .channel import Family
from .mapping import Scheme

__all__ = ["NoClosedForm", "qfunc", "theoretical_ber", "is_approximate"]


class NoClosedForm(LookupError):
    """No textbook expression exists here for the requested combination."""


def qfunc(x: float) -> float:
    """Gaussian tail probability P(Z > x)."""
    return 0.5 * math.erfc(x / math.sqrt(2.0))


def _is_square_qam(order: int) -> bool:
    return order >= 4 and math.isqrt(order) ** 2 == order


def is_approximate(scheme, order: int) -> bool:
    """True where the expression is a Gray-mapping nearest-neighbour approximation."""
    return Scheme(scheme) is Scheme.QAM and order > 4


def theoretical_ber(scheme, order: int, family, ebn0_db: float, k_factor: float = 0.0) -> float:
    """Reference bit error probability at ``ebn0_db``.

    Covered: BPSK/QPSK and square M-QAM over AWGN, DBPSK over AWGN and
    slow flat Rayleigh fading. Anything else raises :class:`NoClosedForm`.
    """
    scheme, family = Scheme(scheme), Family(family)
    gamma = 10.0 ** (ebn0_db / 10.0)
    if family is Family.AWGN:
        if scheme is not Scheme.DPSK and order in (2, 4):
            return qfunc(math.sqrt(2.0 * gamma))
        if scheme is Scheme.QAM and _is_square_qam(order):
            k = math.log2(order)
            return (4.0 / k) * (1.0 - 1.0 / math.sqrt(order)) * qfunc(
                math.sqrt(3.0 * k * gamma / (order - 1))
            )
        if scheme is Scheme.DPSK and order == 2:
            return 0.5 * math.exp(-gamma)
    elif family is Family.RAYLEIGH and scheme is Scheme.DPSK and order == 2:
        return 1.0 / (2.0 * (1.0 + gamma))
    raise NoClosedForm(
        f"no closed form for {order}-{scheme.value.upper()} over {family.value}"
        + (f" (K={k_factor:g})" if family is Family.RICIAN else "")
    )
