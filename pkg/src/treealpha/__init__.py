"""Tree-independence-number machinery for geometric intersection graphs."""

__version__ = "0.1.0"
