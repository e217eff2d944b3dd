"""Exact point-scatterer Helmholtz fields, nodal loop tracing and
probability-current vortex analysis."""

from ._core import (  # noqa: F401
    Box,
    ConfigError,
    Diagnostics,
    FieldSample,
    FieldState,
    GeometryError,
    IncidentWave,
    IoError,
    NodalLoop,
    ProbeError,
    RandomScatterers,
    RefineError,
    ResonanceError,
    RingGeometry,
    RunConfig,
    ScattererSet,
    SingularityError,
    TraceConfig,
    VortexReport,
    __version__,
    config_fingerprint,
    emit_config,
    generate_scatterers,
    kappa_threshold,
    load_config,
    load_config_file,
    probe_loop,
    psi_single,
    resolve_scatterers,
    ring_geometry,
    run_diagnostics,
    trace_all,
    winding_number,
)
