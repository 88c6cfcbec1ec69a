"""Non-binary LDPC codes over the random-subspace noise channel CD(m, eps).

Subpackages are plain modules:

- ``field``: prime-field linear algebra (RREF, kernels, GL sampling)
- ``subspace``: linear and affine subspaces of F_q^m
- ``channel``: the CD(m, eps) channel
- ``codes``: regular and spatially-coupled code construction and file format
- ``decoder``: subspace sum-product and peeling decoders
- ``density``: scalar density evolution and thresholds
- ``montecarlo``: subspace-dimension Monte Carlo experiments
- ``simulate``: decoding campaigns
"""

__version__ = "0.1.0"
