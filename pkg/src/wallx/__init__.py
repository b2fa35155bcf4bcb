"""wallx: exact wall-crossing calculus on blocks of category O for gl(2)^d,
plus root/weight combinatorics for GL(n) over several field embeddings.

The two computational backends live in :mod:`wallx.block` (quiver-algebra
modules, arbitrary d) and :mod:`wallx.weightmodel` (truncated weight modules
for a single gl(2) factor); they are developed independently so that one can
cross-check the other.  Root/weight combinatorics live in
:mod:`wallx.rootdata`, :mod:`wallx.parabolic` and :mod:`wallx.ltensor`;
hypercube diagrams in :mod:`wallx.hypercube`; parameter-side bookkeeping in
:mod:`wallx.galois`.
"""

__version__ = "0.1.0"
