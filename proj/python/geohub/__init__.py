"""Geodesic centroids, RMS dispersion and k-means regions for geocoded publication records."""

from ._core import *  # noqa: F401,F403
from ._core import __version__  # noqa: F401
