# SPDX-License-Identifier: Apache-2.0
"""Balanced-truncation model order reduction for multi-port RLCk circuits."""

from btmor._core import (  # noqa: F401
    ConvergenceTrace,
    DescriptorSystem,
    EksmResult,
    FrequencyGrid,
    FrequencySweep,
    GridSpacing,
    Netlist,
    NumericalError,
    Rom,
    RomProvenance,
    StopReason,
    SweepFormat,
    SweepKind,
    TraceRecord,
    ValidationError,
    __version__,
    assemble_mna,
    evaluate_tf,
    export_sweep,
    generate_coupled_lines,
    generate_ladder,
    generate_mesh,
    h_to_s,
    hankel_singular_values,
    load_model,
    make_descriptor,
    max_relative_error,
    orth,
    parse_netlist,
    parse_sweep_csv,
    parse_touchstone,
    reduce_dense,
    reduce_eksm,
    regularize,
    save_rom_bundle,
    save_system_bundle,
    solve_gramians_dense,
    solve_lyapunov_dense,
)

__all__ = [name for name in dir() if not name.startswith("_")]
