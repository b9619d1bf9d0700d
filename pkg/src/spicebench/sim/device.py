"""Square-law (level-1) MOSFET evaluation.

Drain current regions for an NMOS with vds >= 0:

* cutoff (vgs <= vto):        id = 0
* triode (vds < vgs - vto):   id = beta * ((vgs-vto)*vds - vds^2/2) * (1 + lambda*vds)
* saturation:                 id = beta/2 * (vgs-vto)^2 * (1 + lambda*vds)

where beta = KP * W/L (times the device multiplicity). The current is
continuous (with continuous gm) across the triode/saturation boundary.
Negative vds is handled by swapping source and drain (the device is
symmetric); PMOS devices evaluate through polarity reflection.
"""

from __future__ import annotations


def nmos_square_law(
    vgs: float, vds: float, vto: float, beta: float, lam: float
) -> tuple[float, float, float]:
    """Forward-mode (vds >= 0) evaluation. Returns (id, gm, gds)."""
    vov = vgs - vto
    if vov <= 0.0:
        return 0.0, 0.0, 0.0
    f = 1.0 + lam * vds
    if vds < vov:  # triode
        core = vov * vds - 0.5 * vds * vds
        i = beta * core * f
        gm = beta * vds * f
        gds = beta * ((vov - vds) * f + core * lam)
    else:  # saturation
        core = 0.5 * vov * vov
        i = beta * core * f
        gm = beta * vov * f
        gds = beta * core * lam
    return i, gm, gds


def mos_current(
    kind: str, vgs: float, vds: float, vto: float, beta: float, lam: float
) -> tuple[float, float, float]:
    """Channel current flowing drain-to-source plus small-signal conductances.

    ``kind`` is "NMOS" or "PMOS". gm is d(id)/d(vgs) and gds is d(id)/d(vds)
    in terminal coordinates, valid in every region including the swapped
    (vds < 0) mode.
    """
    if kind == "PMOS":
        i, gm, gds = mos_current("NMOS", -vgs, -vds, -vto, beta, lam)
        return -i, gm, gds
    if vds >= 0.0:
        return nmos_square_law(vgs, vds, vto, beta, lam)
    # symmetric device: the more positive terminal acts as the drain
    i, gm, gds = nmos_square_law(vgs - vds, -vds, vto, beta, lam)
    return -i, -gm, gm + gds
