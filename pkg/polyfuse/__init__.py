from polyfuse.version import version

__version__ = version
