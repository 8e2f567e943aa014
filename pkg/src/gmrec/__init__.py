"""gmrec: recovery of symmetric graph matrices from linear measurements.

Library layout:

* :mod:`gmrec.graphs` — graphs, graph matrices, admittance construction, CSV IO.
* :mod:`gmrec.ensembles` — random graph samplers and (mu, K, rho) sparsity.
* :mod:`gmrec.measurement` — A = B Y + Z synthesis and manifest ingestion.
* :mod:`gmrec.solver` — l1 engines, dual certificates, spark/RIC/xi diagnostics.
* :mod:`gmrec.recovery` — three-stage scheme, iterative heuristic, basis pursuit.
* :mod:`gmrec.bounds` — information-theoretic floors and achievable counts.
* :mod:`gmrec.harness` — Monte-Carlo trials, metrics, sample-complexity sweeps.
"""

from .bounds import (
    BoundInputs,
    binary_entropy_nats,
    entropy_er,
    entropy_uniform_trees,
    er_sparsity_profile,
    eta_bound,
    fano_floor_noiseless,
    fano_floor_noisy,
    min_measurements,
    sufficient_m_noiseless,
    tree_sparsity_profile,
)
from .ensembles import (
    EnsembleSpec,
    SparsityProfile,
    decode_prufer,
    estimate_rho,
    in_sparsity_class,
    sample,
)
from .errors import (
    ConfigError,
    DegenerateRICError,
    GmrecError,
    InfeasibleError,
    NumericalError,
    SingularMatrixError,
    SizeGuardError,
)
from .graphs import (
    DegreeProfile,
    Field,
    Graph,
    GraphMatrix,
    build_admittance,
    build_graph_matrix,
    degree_profile,
    read_graph_csv,
    read_matrix_csv,
    support,
    write_graph_csv,
    write_matrix_csv,
)
from .harness import (
    Grid,
    Metrics,
    ScanUp,
    SweepResult,
    TrialSpec,
    emit_recovery,
    emit_sweep,
    ingest,
    metrics,
    per_trial_minimal_m,
    run_trials,
    sample_complexity_sweep,
)
from .measurement import (
    MeasurementSet,
    NominalModel,
    extract_perturbation,
    load_measurements,
    power_flow_like,
    sample_generator,
    save_measurements,
    synthesize,
)
from .recovery import (
    RecoveryConfig,
    RecoveryResult,
    RecoveryStatus,
    consistency_check,
    heuristic,
    recover,
    resolve_unknowns,
    retrieve_columns,
    three_stage,
    vectorized_bp,
)
from .rng import stream
from .solver import (
    SignCones,
    SolveReport,
    SolveStatus,
    SolverOptions,
    certify_l1,
    dual_certificate,
    ric,
    solve_l1,
    solve_l1_batch,
    solve_square,
    spark,
    xi,
)

__version__ = "0.1.0"
