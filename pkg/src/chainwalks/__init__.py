"""Walk combinatorics on reflexive graphs, brick partition calculus, and
the amalgamation machinery built on them."""

__version__ = "0.1.0"
