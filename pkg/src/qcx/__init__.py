"""Quasiconformal extensions of integer automorphisms and quasisymmetric embeddings of Z.

Modules: ``mapcore`` (tent slides and map expressions), ``seqcore``
(sequence conditions), ``permbuild`` (block permutations), ``splitflow``
(splitting and automorphism extension), ``embed`` (embeddings into R),
``explattice`` (the exponential lattice), ``render`` and ``cli``.
"""
__version__ = "0.1.0"
