"""Smooth graph signal interpolation with the Markov variation."""

# This will be overwritten by setuptools-scm during build
__version__ = "0.1.0"

# Import the version from _version.py which is generated by setuptools-scm
try:
    from ._version import version as __version__
except ImportError:
    pass
