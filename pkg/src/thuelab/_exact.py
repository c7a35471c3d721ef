"""Exact sign evaluation for the geometric predicates.

Every IEEE-754 double is a dyadic rational, so evaluating the predicate
determinants over `fractions.Fraction` gives the mathematically exact sign
for any float input. This is the slow path behind the floating-point
filters in the kernel modules; both kernels share it.
"""

from fractions import Fraction

__all__ = ["orient2d", "incircle"]


def _sign(value) -> int:
    if value > 0:
        return 1
    if value < 0:
        return -1
    return 0


def orient2d(ax, ay, bx, by, cx, cy) -> int:
    """Exact sign of det(b - a, c - a)."""
    acx = Fraction(ax) - Fraction(cx)
    acy = Fraction(ay) - Fraction(cy)
    bcx = Fraction(bx) - Fraction(cx)
    bcy = Fraction(by) - Fraction(cy)
    return _sign(acx * bcy - acy * bcx)


def incircle(ax, ay, bx, by, cx, cy, dx, dy) -> int:
    """Exact sign of the lifted 3x3 in-circle determinant.

    Positive means d lies strictly inside the circumcircle of the
    counterclockwise triangle (a, b, c).
    """
    adx = Fraction(ax) - Fraction(dx)
    ady = Fraction(ay) - Fraction(dy)
    bdx = Fraction(bx) - Fraction(dx)
    bdy = Fraction(by) - Fraction(dy)
    cdx = Fraction(cx) - Fraction(dx)
    cdy = Fraction(cy) - Fraction(dy)
    alift = adx * adx + ady * ady
    blift = bdx * bdx + bdy * bdy
    clift = cdx * cdx + cdy * cdy
    det = (
        alift * (bdx * cdy - cdx * bdy)
        + blift * (cdx * ady - adx * cdy)
        + clift * (adx * bdy - bdx * ady)
    )
    return _sign(det)
