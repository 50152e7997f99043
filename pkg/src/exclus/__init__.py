"""Explainable clustering via axis-aligned threshold trees."""
from .core import (
    AxisCut,
    BudgetExceededError,
    Clustering,
    CostReport,
    Dataset,
    DegenerateInputError,
    ExclusError,
    InadmissibleCutError,
    Leaf,
    NoCutError,
    Split,
    StructuralError,
    ThresholdTree,
    UndefinedSpacingError,
    cost_kcenters,
    cost_kmeans,
    cost_kmedians,
    evaluate,
    induce_clustering,
    price_ratio,
    reoptimize,
    spacing,
)
from .dp_trees import build_combined_tree, build_di, cut_stats
from .ex_greedy import fit_ex_greedy
from .imm import fit_imm
from .instances import (
    KCenterLBParams,
    gen_blobs,
    gen_kcenter_lb,
    gen_spacing_lb,
    load_bundled,
    load_csv,
    write_csv,
)
from .kcenter import fit_ex_kcenter
from .maxspacing import fit_ex_single_link, single_linkage_opt
from .reference import ReferenceConfig, kcenters_reference, kmeans_reference, kmedians_reference

__version__ = "0.1.0"
