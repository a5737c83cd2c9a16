"""Dual integer-height and circle-spin models on finite graphs: discrete
calculus, potential pairs, exact identity oracles, graph transforms,
Metropolis samplers and torus observables."""

from .calculus import (GreenSolver, TreeGauge, d, d_star, green_matrix,
                       green_solve, hodge_project, laplacian, tree_gauge)
from .graphs import (FiniteGraph, build_cycle, build_path, build_star,
                     build_torus, build_wired_box, from_edges,
                     graph_from_text, graph_to_text)
from .oracle import (ModelSpec, VerificationReport, dual_sector,
                     height_expect, height_function_expect, make_model,
                     spin_expect, twisted_partition, verify_covariance_duality,
                     verify_duality, verify_gff_bound)
from .potentials import (HeightPotential, PotentialPair, SpinPotential,
                         height_from_spin, make_annealed, make_ivgff,
                         make_lipschitz, make_xy, merge_parallel,
                         spin_from_height, split_potential)

__version__ = "0.1.0"
