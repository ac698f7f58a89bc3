"""Row-sum matrices over generalized dihedral groups and certified
Hamilton-Waterloo 2-factorizations."""

__version__ = "0.1.0"
