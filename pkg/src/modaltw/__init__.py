"""Modal satisfiability through incidence structures of bounded width."""

__version__ = "0.1.0"
