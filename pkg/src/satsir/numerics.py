"""Zero-band comparisons and small closed-form solvers shared by the analysis modules."""

from __future__ import annotations

import cmath
import math

#: relative width of the band inside which a computed quantity counts as zero
ZERO_BAND = 1e-11


def band_scale(*terms: float) -> float:
    return max((abs(t) for t in terms), default=0.0)


def is_zero(x: float, *terms: float, band: float = ZERO_BAND) -> bool:
    """``|x| < band * max|terms|``; ``terms`` are the summands that produced ``x``."""
    return abs(x) <= band * band_scale(x, *terms)


def band_sign(x: float, *terms: float, band: float = ZERO_BAND) -> int:
    if is_zero(x, *terms, band=band):
        return 0
    return 1 if x > 0 else -1


def quadratic_roots(a: float, b: float, c: float) -> tuple[float, float] | None:
    """Real roots of ``a x^2 + b x + c`` in ascending order, or None if complex.

    Uses the cancellation-free form q = -(b + sign(b) sqrt(disc)) / 2.
    """
    disc = b * b - 4.0 * a * c
    if disc < 0.0:
        return None
    root = math.sqrt(disc)
    if b == 0.0:
        r1, r2 = -root / (2.0 * a), root / (2.0 * a)
    else:
        q = -0.5 * (b + math.copysign(root, b))
        r1 = q / a
        r2 = c / q if q != 0.0 else r1
    return (r1, r2) if r1 <= r2 else (r2, r1)


def char_roots(W: float, U: float) -> tuple[complex, complex]:
    """Roots of ``lam^2 + W lam + U``, real ones ascending, complex pair with Im < 0 first."""
    real = quadratic_roots(1.0, W, U)
    if real is not None:
        return complex(real[0]), complex(real[1])
    half = -0.5 * W
    im = 0.5 * math.sqrt(4.0 * U - W * W)
    return complex(half, -im), complex(half, im)


def eig2(matrix) -> tuple[complex, complex]:
    """Eigenvalues of a 2x2 matrix via its trace and determinant."""
    (a, b), (c, d) = matrix
    return char_roots(-(a + d), a * d - b * c)


def eig2_direct(matrix) -> tuple[complex, complex]:
    """Textbook eigenvalue formula; kept separate as an independent cross-check."""
    (a, b), (c, d) = matrix
    half_tr = 0.5 * (a + d)
    root = cmath.sqrt(0.25 * (a - d) ** 2 + b * c)
    return half_tr - root, half_tr + root
