"""thuelab: Voronoi/Delaunay analysis of saturated unit-circle packings.

Builds tessellations of circle packings (torus or box domains), checks the
structural facts that hold around every Voronoi vertex of a saturated
packing, dissects the plane into lattice-related triangles, and certifies
the per-packing density bound pi/(2*sqrt(3)).
"""

__version__ = "0.1.0"

from thuelab.backend import BACKEND_NAME
from thuelab.geometry import (
    Circle,
    DegenerateGeometryError,
    Point,
    Segment,
    ToleranceConfig,
)
from thuelab.lattice import Basis2
from thuelab.packing import Domain, PackingConfiguration

__all__ = [
    "BACKEND_NAME",
    "Basis2",
    "Circle",
    "DegenerateGeometryError",
    "Domain",
    "PackingConfiguration",
    "Point",
    "Segment",
    "ToleranceConfig",
    "__version__",
]
