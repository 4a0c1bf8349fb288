"""
CLOSED FORMS - Rumus tertutup sistem dua-level (level hibridisasi dan bobot P_+-(1))
"""

import numpy as np


def two_level_closed_form(e1, e2, w):
    """Return (e_minus, e_plus, P_minus(1), P_plus(1)) for h = [[e1, w], [w, e2]].

    Works elementwise on arrays. A vanishing denominator (w = 0 on the
    level that sits on site 2) gives weight 0; e1 = e2 with w = 0 gives 1/2.
    """
    e1, e2, w = np.broadcast_arrays(*(np.asarray(x, dtype=float) for x in (e1, e2, w)))
    delta = e1 - e2
    root = np.sqrt(delta ** 2 + 4.0 * w ** 2)
    mean = 0.5 * (e1 + e2)
    e_minus = mean - 0.5 * root
    e_plus = mean + 0.5 * root

    def weight(shifted):
        denominator = shifted ** 2 + 4.0 * w ** 2
        safe = np.where(denominator > 0, denominator, 1.0)
        return np.where(denominator > 0, shifted ** 2 / safe, 0.0)

    # delta -+ root without cancellation
    with np.errstate(divide='ignore', invalid='ignore'):
        plus = np.where(delta < 0, 4.0 * w ** 2 / (root - delta), delta + root)
        minus = np.where(delta > 0, -4.0 * w ** 2 / (root + delta), delta - root)
    p_minus = weight(minus)
    p_plus = weight(plus)

    degenerate = (delta == 0) & (w == 0)
    p_minus = np.where(degenerate, 0.5, p_minus)
    p_plus = np.where(degenerate, 0.5, p_plus)
    return e_minus, e_plus, p_minus, p_plus
