"""Integer-order cylinder functions, their derivatives and real zeros.

Values come from the Cephes/AMOS routines wrapped by ``scipy.special``,
with Hankel functions assembled as ``J +- iY``;
derivatives use the three-term relation so every module differentiates the
same way.
"""

from dataclasses import dataclass

import numpy as np
from scipy import special
from scipy.optimize import brentq

from .errors import CapabilityError, DomainError

__all__ = [
    "KINDS",
    "MAX_ORDER",
    "ZeroTable",
    "cyl_eval",
    "cyl_deriv",
    "cyl_zeros",
    "hankel_wronskian_residual",
]

MAX_ORDER = 60
KINDS = ("J", "Y", "H1", "H2")

_FUNCS = {
    "J": special.jv,
    "Y": special.yv,
    # J +- iY keeps the real part exact where Y_n dwarfs J_n (large n, small z)
    "H1": lambda n, z: special.jv(n, z) + 1j * special.yv(n, z),
    "H2": lambda n, z: special.jv(n, z) - 1j * special.yv(n, z),
}


def _check(kind, n, z):
    if kind not in _FUNCS:
        raise ValueError(f"unknown cylinder function kind {kind!r}")
    if abs(int(n)) > MAX_ORDER:
        raise CapabilityError(f"order {n} exceeds the supported maximum {MAX_ORDER}")
    if isinstance(z, (float, int, np.floating)):
        # scalar fast path: root finding calls this hundreds of thousands of times
        z = float(z)
        lo = z
    else:
        z = np.asarray(z, dtype=float)
        lo = z.min(initial=np.inf)
    if kind == "J":
        if lo < 0:
            raise DomainError("J_n is evaluated for z >= 0 only")
    elif lo <= 0:
        raise DomainError(f"{kind}_n is singular at z <= 0")
    return z


def cyl_eval(kind, n, z):
    """Evaluate ``J_n``, ``Y_n``, ``H1_n`` or ``H2_n`` at real ``z`` for integer ``n``.

    Returns a real array for J and Y and a complex one for the Hankel kinds.
    """
    z = _check(kind, n, z)
    n = int(n)
    # exact reflection for negative orders; scipy's e^{i pi n} phase leaks
    # round-off times the large Y_n into the real part
    sign = -1.0 if n < 0 and n % 2 else 1.0
    return sign * _FUNCS[kind](abs(n), z)


def cyl_deriv(kind, n, z):
    """Derivative with respect to the argument, ``(f_{n-1} - f_{n+1}) / 2``.

    For ``n = 0`` this reduces to ``-f_1``.
    """
    n = int(n)
    z = _check(kind, n, z)
    if n == 0:
        return -cyl_eval(kind, 1, z)
    return 0.5 * (cyl_eval(kind, n - 1, z) - cyl_eval(kind, n + 1, z))


@dataclass(frozen=True)
class ZeroTable:
    """Ascending positive zeros of ``J_n`` (``kind='J'``) or ``J_n'`` (``kind="J'"``)."""

    kind: str
    order: int
    zeros: np.ndarray

    def scaled(self):
        """Zeros divided by 2*pi, the normalisation used for kR tables."""
        return self.zeros / (2.0 * np.pi)


def cyl_zeros(kind, n, count, step=np.pi / 20):
    """First ``count`` positive zeros of ``J_n`` or ``J_n'``.

    Zeros are bracketed by sign changes on a uniform grid of spacing ``step``
    and refined with Brent's method. The trivial zero at the origin is never
    reported.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    if kind == "J":
        fun = lambda z: special.jv(n, z)  # noqa: E731
    elif kind in ("J'", "Jp", "dJ"):
        kind = "J'"
        fun = lambda z: float(cyl_deriv("J", n, z))  # noqa: E731
    else:
        raise ValueError(f"zeros are available for J and J' only, got {kind!r}")
    _check("J", n, 1.0)

    zeros = []
    a = step
    fa = fun(a)
    while len(zeros) < count:
        b = a + step
        fb = fun(b)
        if fa == 0.0:
            zeros.append(a)
        elif fa * fb < 0.0:
            zeros.append(brentq(fun, a, b, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=200))
        a, fa = b, fb
    return ZeroTable(kind, int(n), np.array(zeros[:count]))


def hankel_wronskian_residual(l, z):
    """``|z (H2_l' H1_l - H2_l H1_l') + 4i/pi|``, zero in exact arithmetic."""
    h1 = cyl_eval("H1", l, z)
    h2 = cyl_eval("H2", l, z)
    w = z * (cyl_deriv("H2", l, z) * h1 - h2 * cyl_deriv("H1", l, z))
    return float(np.abs(w + 4j / np.pi))
