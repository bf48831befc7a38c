"""Torsion in the homology of matching complexes via multigraph quotient complexes."""
from .combinatorics import BlockPartition, Charge, Signature
from .chain import ChainComplex, SparseIntMatrix, verify_d_squared
from .homology import HomologyGroup, RingSpec, homology, smith_normal_form

__all__ = [
    "BlockPartition", "Charge", "Signature", "ChainComplex", "SparseIntMatrix",
    "verify_d_squared", "HomologyGroup", "RingSpec", "homology", "smith_normal_form",
]
