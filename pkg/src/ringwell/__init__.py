"""Spectral toolkit for sudden barrier insertion on a quantum ring."""

from .core import (
    DEFAULT_CONFIG,
    PHI,
    ChamberExpansion,
    RingConfig,
    RingState,
    WellSpec,
    evaluate,
    norm,
    psi_state,
    ring_energy,
    well_energy,
)
from .energy import (
    EnergyConvention,
    EnergyLedger,
    FixedNodeInput,
    delta_E,
    divergence_scan,
    energy_ledger,
    truncated_energy,
)
from .evolution import OutOfDomain, TimeGrid, evolve, sample_grid
from .insertion import (
    BarrierLabel,
    EntanglementMode,
    ExtendedState,
    ExtendedTerm,
    PointClass,
    TwoChamberState,
    build_extended_after,
    classify_point,
    insert_double,
    insert_single,
)
from .loclin import (
    ConsistencyReport,
    DenominatorZero,
    EmptyGrid,
    RWeightSolution,
    consistency_scan,
    residual_eq9,
    solve_R_weights,
)
from .overlap import (
    CoeffFamily,
    Convention,
    ConvergenceFailure,
    QuadratureSettings,
    closed_form_coeff,
    family_oracle,
    parseval_defect,
    quadrature_overlap,
)

__version__ = "0.1.0"
