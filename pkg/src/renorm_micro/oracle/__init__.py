"""Grid oracle for the weighted S^1-valued Dirichlet problem on perforated disks."""

from .grid import (Circle, Ellipse, GridField, GridOptions, NodeState, build_grid,
                   build_ring_grid)
from .solve import (CGResult, EnergyReport, discrete_energy, edge_alpha, energy_report, pcg,
                    solve_phase, total_energy)
from .studies import (RECORD_FIELDS, AnnulusComparison, ExpansionStudy, GridLoop, OracleRecord,
                      Richardson, annulus_comparison, expansion_residual, expansion_study, f_of_R,
                      oracle_run, richardson, winding_check)

__all__ = [
    "Circle",
    "Ellipse",
    "GridField",
    "GridOptions",
    "NodeState",
    "build_grid",
    "build_ring_grid",
    "CGResult",
    "EnergyReport",
    "discrete_energy",
    "edge_alpha",
    "energy_report",
    "pcg",
    "solve_phase",
    "total_energy",
    "RECORD_FIELDS",
    "AnnulusComparison",
    "ExpansionStudy",
    "GridLoop",
    "OracleRecord",
    "Richardson",
    "annulus_comparison",
    "expansion_residual",
    "expansion_study",
    "f_of_R",
    "oracle_run",
    "richardson",
    "winding_check",
]
