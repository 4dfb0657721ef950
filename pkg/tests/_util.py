from tensegrity_ptm.model import Geometry, Loading


def split(p):
    """Parameter dict -> (Geometry, Loading, rho)."""
    g = Geometry(p["L1"], p["L2"], p["k"], p.get("l0", 0.0))
    l = Loading(p["F3"], p["F4"], p.get("F3x", 0.0), p.get("F4x", 0.0))
    return g, l, p["rho"]
