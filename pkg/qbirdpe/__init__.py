from qbirdpe.qbird.sampler import run_qbird
from qbirdpe.baselines.grid_posterior import brute_force_posterior
from qbirdpe.baselines.classical_mh import classical_mh
