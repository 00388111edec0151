from app.median.experiment import RatioRow, exact_baselines, load_baselines, run_experiment, write_ratios_csv
from app.median.graph import graph_from_edges, graph_hash, grid_road_graph, load_graph, write_graph
from app.median.incremental import build_incremental, facility_order, project_bids, universe_costs
from app.median.kmedoids import assignment_cost, kmedoids, medoid_ladder, pam_swap, seed_medoids
from app.median.shortest_paths import dijkstra, shortest_path_matrix

__all__ = [
    "RatioRow",
    "assignment_cost",
    "build_incremental",
    "dijkstra",
    "exact_baselines",
    "facility_order",
    "graph_from_edges",
    "graph_hash",
    "grid_road_graph",
    "kmedoids",
    "load_baselines",
    "load_graph",
    "medoid_ladder",
    "pam_swap",
    "project_bids",
    "run_experiment",
    "seed_medoids",
    "shortest_path_matrix",
    "universe_costs",
    "write_graph",
    "write_ratios_csv",
]
