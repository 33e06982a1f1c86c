"""Independent oracles, derived by hand rather than through the package.

The champagne bottle at the origin: with coordinates (x1, y1, x2, y2),
H = (y1^2 + y2^2)/2 - (x1^2 + x2^2) + (x1^2 + x2^2)^2 and J = x1 y2 - x2 y1.
Their Hessians at 0 are written out entry by entry and the linearized flow
of H + mu J is diagonalized by a dense eigen-solve.
"""

import numpy as np

POISSON = np.array([[0, 1, 0, 0], [-1, 0, 0, 0], [0, 0, 0, 1], [0, 0, -1, 0]], dtype=float)

HESS_H = np.diag([-2.0, 1.0, -2.0, 1.0])
HESS_J = np.zeros((4, 4))
HESS_J[0, 3] = HESS_J[3, 0] = 1.0   # d2/dx1 dy2
HESS_J[2, 1] = HESS_J[1, 2] = -1.0  # d2/dx2 dy1


def champagne_origin_spectrum(mu: float) -> np.ndarray:
    return np.linalg.eigvals(POISSON @ (HESS_H + mu * HESS_J))


def closed_form_spectrum(mu: float) -> np.ndarray:
    r = np.sqrt(2.0)
    return np.array([s * r + 1j * t * mu for s in (1, -1) for t in (1, -1)])
