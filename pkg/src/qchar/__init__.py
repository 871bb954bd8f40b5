"""Characters of principal subspaces of affine sl2 and sl3, with exact checks."""

__version__ = "0.1.0"
