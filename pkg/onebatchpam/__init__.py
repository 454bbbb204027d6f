# -*- encoding: utf-8 -*-
"""k-medoids clustering with a single batch of precomputed dissimilarities.

The package implements OneBatchPAM (a FasterPAM-style local search driven by a
batch estimate of the objective), its classic competitors and the benchmark
harness comparing them by objective, wall time and number of dissimilarity
evaluations.
"""

__version__ = "0.1.0"
