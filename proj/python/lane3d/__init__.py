"""Geometric core for monocular 3D lane detection.

Thin wrapper over the compiled extension: virtual-top-view/ego transforms,
the geometry-guided anchor codec, the anchor loss evaluator, min-cost-flow
lane matching with AP/F-score metrics, and synthetic scene fixtures.
"""

from lane3d._core import *  # noqa: F401,F403
from lane3d._core import __version__  # noqa: F401
