"""Butcher tableaux of the four-stage third-order additive IMEX scheme.

Coefficients are the ARK3(2)4L[2]SA pair of Kennedy and Carpenter, kept as
exact fractions and converted to floats once.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction as F

import numpy as np

GAMMA = F(1767732205903, 4055673282236)

_B = [F(1471266399579, 7840856788654), F(-4482444167858, 7529755066697),
      F(11266239266428, 11593286722821), GAMMA]
_C = [F(0), F(1767732205903, 2027836641118), F(3, 5), F(1)]

EXPLICIT_A = [
    [F(0), F(0), F(0), F(0)],
    [F(1767732205903, 2027836641118), F(0), F(0), F(0)],
    [F(5535828885825, 10492691773637), F(788022342437, 10882634858940), F(0), F(0)],
    [F(6485989280629, 16251701735622), F(-4246266847089, 9704473918619),
     F(10755448449292, 10357097424841), F(0)],
]

IMPLICIT_A = [
    [F(0), F(0), F(0), F(0)],
    [F(1767732205903, 4055673282236), GAMMA, F(0), F(0)],
    [F(2746238789719, 10658868560708), F(-640167445237, 6845629431997), GAMMA, F(0)],
    list(_B),
]


@dataclass(frozen=True)
class ButcherPair:
    a_E: np.ndarray
    b_E: np.ndarray
    c_E: np.ndarray
    a_I: np.ndarray
    b_I: np.ndarray
    c_I: np.ndarray

    @property
    def stages(self) -> int:
        return len(self.b_E)

    def check(self, tol: float = 1e-12) -> None:
        """Raise ``AssertionError`` if a structural invariant fails."""
        assert np.allclose(np.triu(self.a_E), 0.0, atol=0.0), "explicit A not strictly lower"
        assert np.allclose(np.triu(self.a_I, 1), 0.0, atol=0.0), "implicit A not lower"
        assert self.a_I[0, 0] == 0.0
        assert np.all(np.diag(self.a_I)[1:] == self.a_I[1, 1])
        assert np.array_equal(self.b_I, self.a_I[-1]), "implicit part not stiffly accurate"
        assert np.array_equal(self.b_E, self.b_I)
        assert np.max(np.abs(self.a_E.sum(axis=1) - self.c_E)) <= tol
        assert np.max(np.abs(self.a_I.sum(axis=1) - self.c_I)) <= tol


def _floats(rows) -> np.ndarray:
    return np.array([[float(x) for x in row] for row in rows])


ARK3 = ButcherPair(
    a_E=_floats(EXPLICIT_A),
    b_E=np.array([float(x) for x in _B]),
    c_E=np.array([float(x) for x in _C]),
    a_I=_floats(IMPLICIT_A),
    b_I=np.array([float(x) for x in _B]),
    c_I=np.array([float(x) for x in _C]),
)


def implicit_stability(z, pair: ButcherPair = ARK3):
    """``R(z) = 1 + z b^T (I - z A)^{-1} 1`` of the implicit tableau."""
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    s = pair.stages
    ones = np.ones(s)
    out = np.empty(z.shape, dtype=complex)
    for idx, zi in np.ndenumerate(z):
        out[idx] = 1.0 + zi * pair.b_I @ np.linalg.solve(np.eye(s) - zi * pair.a_I, ones)
    return out


def implicit_stability_exact(z: F) -> F:
    """Same as :func:`implicit_stability` in exact rational arithmetic."""
    s = len(_B)
    # forward substitution for the lower-triangular system (I - z A) k = 1
    k = []
    for i in range(s):
        acc = F(1) + z * sum((IMPLICIT_A[i][j] * k[j] for j in range(i)), F(0))
        k.append(acc / (1 - z * IMPLICIT_A[i][i]))
    return 1 + z * sum((b * ki for b, ki in zip(_B, k)), F(0))
