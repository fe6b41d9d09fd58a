"""Exact computational toolkit for (semi-)stability of decomposable sheaf
morphisms under their full (non-reductive) automorphism groups: polarization
chambers, quotient-existence certificates, codimension constants,
destabilizer searches and the reductive enlargement."""

__version__ = "0.1.0"
