# SPDX-License-Identifier: Apache-2.0
"""Smoke tests for the python bindings."""

import numpy as np
import pytest

import btmor


def ladder_system(sections=6, ports=2, seed=600):
    return btmor.assemble_mna(btmor.parse_netlist(btmor.generate_ladder(sections, ports, seed)))


def test_parse_assemble_counts():
    text = btmor.generate_ladder(3, 1, 1)
    nl = btmor.parse_netlist(text)
    assert nl.node_count == 4
    assert nl.branch_count == 3
    sys = btmor.assemble_mna(nl)
    assert sys.order == 7
    assert sys.n + sys.m == sys.order
    assert sys.G.shape == (7, 7)
    assert sys.B.shape == (7, 1)
    assert sys.in_ports == ["p1"]


def test_parse_errors_are_value_errors():
    with pytest.raises(ValueError, match="line 1"):
        btmor.parse_netlist("R1 1 0 -5\n")


def test_lyapunov_solver_residual():
    rng = np.random.default_rng(7)
    a = -(np.eye(6) + rng.standard_normal((6, 6)) @ rng.standard_normal((6, 6)).T * 0.1)
    f = rng.standard_normal((6, 3))
    w = f @ f.T
    x = btmor.solve_lyapunov_dense(a, w)
    assert np.linalg.norm(a @ x + x @ a.T + w) <= 1e-10 * np.linalg.norm(w)
    assert np.allclose(x, x.T)


def test_dense_and_eksm_reduction_agree():
    sys = ladder_system()
    res = btmor.reduce_eksm(sys)
    assert res.trace.stop_reason == btmor.StopReason.three_below_tol
    dense = btmor.reduce_dense(sys, order=res.rom.order)
    grid = btmor.FrequencyGrid.linear(1e8, 1e10, 20)
    agree = btmor.max_relative_error(btmor.evaluate_tf(dense, grid), btmor.evaluate_tf(res.rom, grid))
    assert agree < 1e-6
    err = btmor.max_relative_error(btmor.evaluate_tf(sys, grid), btmor.evaluate_tf(res.rom, grid))
    assert err < 1e-2
    assert res.rom.order < sys.order


def test_gramians_and_hsv():
    sys = ladder_system(5, 1, 9)
    p, q = btmor.solve_gramians_dense(sys)
    sigmas = btmor.hankel_singular_values(p, q)
    assert sorted(sigmas, reverse=True) == list(sigmas)
    assert sigmas[0] > 0


def test_sweep_export_round_trip():
    sys = ladder_system(4, 2, 3)
    grid = btmor.FrequencyGrid.linear(1e8, 5e9, 6)
    sweep = btmor.evaluate_tf(sys, grid)
    assert sweep.kind == btmor.SweepKind.impedance
    assert len(sweep.samples) == 6
    assert sweep.samples[0].shape == (2, 2)
    s = btmor.h_to_s(sweep, 50.0)
    text = btmor.export_sweep(s, btmor.SweepFormat.touchstone)
    back = btmor.parse_touchstone(text, 2)
    dev = max(np.abs(a - b).max() for a, b in zip(s.samples, back.samples))
    assert dev <= 1e-12


def test_bundle_round_trip(tmp_path):
    sys = ladder_system(4, 1, 11)
    rom = btmor.reduce_dense(sys, target_error=1e-3)
    btmor.save_rom_bundle(tmp_path / "rom", rom)
    model = btmor.load_model(tmp_path / "rom")
    assert model.order == rom.order
    grid = btmor.FrequencyGrid.linear(1e8, 1e10, 8)
    err = btmor.max_relative_error(btmor.evaluate_tf(sys, grid), btmor.evaluate_tf(model, grid))
    assert err < 1e-2


def test_orth_is_orthonormal():
    rng = np.random.default_rng(5)
    q = btmor.orth(rng.standard_normal((30, 4)))
    assert np.allclose(q.T @ q, np.eye(4), atol=1e-12)
