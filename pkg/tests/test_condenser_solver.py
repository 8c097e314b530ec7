import math
import warnings

import numpy as np
import pytest

from ferrand.capacities import tau
from ferrand.condenser import solver
from ferrand.condenser.geometry import Arc, Disk, Ray, Segment
from ferrand.condenser.solver import (
    OracleError, SolveReport, SolverConfig, build_grid, discretize, estimate_capacity,
    richardson_extrapolate, solve_capacity,
)
from ferrand.condenser.spec import CondenserSpec

FAST = SolverConfig(cells_per_gap=8)


def discretization_error(r):
    # a refused extrapolation leaves only the spread of the grid sequence
    spread = float(np.max(np.abs(np.diff(r.sequence))))
    return spread if r.extrapolation_refused else abs(r.capacity - r.best)


def teichmuller(s=1.0):
    return CondenserSpec((Segment(-1 + 0j, 0j),), (Ray(s + 0j, 1 + 0j),), "auto")


def annulus():
    return CondenserSpec((Arc(0j, 1.0, 0.0, 2 * math.pi),), (Arc(0j, math.e, 0.0, 2 * math.pi),))


# --- Richardson ---------------------------------------------------------------

def test_richardson_constant():
    r = richardson_extrapolate(3.0, 3.0, 3.0)
    assert r.value == 3.0 and not r.refused


def test_richardson_oscillating_refused():
    r = richardson_extrapolate(2.0, 1.9, 1.95)
    assert r.refused and r.value == 1.95 and r.order is None


def test_richardson_non_contracting_refused():
    assert richardson_extrapolate(2.0, 1.9, 1.7).refused


@pytest.mark.parametrize("q", [1.0, 1.5, 2.0])
def test_richardson_recovers_power_law(q):
    h = 0.1
    c = [5.0 + 0.7 * (h / 2**k) ** q for k in range(3)]
    r = richardson_extrapolate(*c)
    assert r.order == pytest.approx(q, rel=1e-9)
    assert r.value == pytest.approx(5.0, rel=1e-12)


def test_refusal_is_flagged_with_a_warning(monkeypatch):
    seq = iter([2.0, 1.9, 1.95])
    fake = lambda spec, grid, config: SolveReport(next(seq), grid.h, 1, 0.0)
    monkeypatch.setattr(solver, "solve_on_grid", fake)
    with pytest.warns(RuntimeWarning):
        r = estimate_capacity(teichmuller(), config=FAST)
    assert r.extrapolation_refused and r.extrapolated is None and r.best == 1.95


# --- closed forms ---------------------------------------------------------------

def test_annulus_modulus():
    r = estimate_capacity(annulus())
    assert abs(r.best - 2 * math.pi) / (2 * math.pi) <= 0.01
    assert r.residual <= 1e-10
    assert len(r.sequence) == 3


@pytest.mark.slow
def test_annulus_extrapolation_gain_on_fine_grids():
    r = estimate_capacity(annulus(), config=SolverConfig(cells_per_gap=24))
    exact = 2 * math.pi
    assert abs(r.best - exact) * 2 <= abs(r.capacity - exact)


@pytest.mark.slow
@pytest.mark.parametrize("s", [0.5, 1.0, 3.0])
def test_teichmuller_capacity(s):
    r = estimate_capacity(teichmuller(s))
    exact = tau(s)
    assert not r.extrapolation_refused
    assert abs(r.best - exact) / exact <= 0.02
    # extrapolation at least halves the error of the finest grid
    assert abs(r.best - exact) * 2 <= abs(r.capacity - exact)


@pytest.mark.slow
def test_grotzsch_capacity():
    spec = CondenserSpec((Disk(0j, 1.0),), (Ray(math.sqrt(2) + 0j, 1 + 0j),), "auto")
    r = estimate_capacity(spec)
    assert abs(r.best - 4.0) / 4.0 <= 0.02


def test_single_level_report_has_no_extrapolant():
    r = estimate_capacity(teichmuller(), config=SolverConfig(cells_per_gap=8, levels=1))
    assert r.extrapolated is None and len(r.sequence) == 1
    assert r.best == r.capacity


def test_node_boundary_option():
    r = estimate_capacity(teichmuller(), config=SolverConfig(cells_per_gap=8, boundary="nodes"))
    assert abs(r.best - 2.0) / 2.0 <= 0.02


def test_report_fields():
    r = solve_capacity(teichmuller(), config=FAST)
    d = r.to_dict()
    assert d["capacity"] > 0 and d["h"] > 0 and d["residual"] <= 1e-10
    assert d["iterations"] >= 0 and d["nodes"] > 0


def test_energy_is_positive_and_residual_small():
    spec = teichmuller()
    grid = build_grid(spec, solver.default_spacing(spec, FAST), 0, FAST)
    disc = discretize(spec, grid, FAST)
    assert disc.energy(np.zeros(disc.n)) >= 0
    assert min(disc.plate_nodes) >= 3


# --- invariances ---------------------------------------------------------------

@pytest.mark.parametrize("c", [0.5, 3.0])
def test_scaling_invariance(c):
    base = estimate_capacity(teichmuller(), config=FAST)
    err = discretization_error(base)
    scaled = estimate_capacity(teichmuller().scaled(c), config=FAST)
    assert abs(scaled.capacity - base.capacity) <= 2 * err


@pytest.mark.parametrize("c", [0.5, 3.0])
def test_scaling_invariance_bounded(c):
    spec = CondenserSpec((Segment(-1 + 0j, 0j),), (Segment(1 + 0.5j, 2 + 1j),))
    with warnings.catch_warnings():
        # the free tip of an oblique plate aliases with the grid
        warnings.simplefilter("ignore", RuntimeWarning)
        base = estimate_capacity(spec, config=FAST)
        scaled = estimate_capacity(spec.scaled(c), config=FAST)
    err = discretization_error(base)
    assert err > 0
    assert abs(scaled.capacity - base.capacity) <= 2 * err


def test_enlarging_plate_increases_capacity():
    cfg = SolverConfig(cells_per_gap=8, levels=1)
    caps = []
    for start in (1.0, 0.8, 0.6):
        spec = CondenserSpec((Segment(-1 + 0j, 0j),), (Segment(start + 0j, 2 + 0j),))
        caps.append(solve_capacity(spec, h=0.05, config=cfg).capacity)
    assert caps[0] <= caps[1] <= caps[2]


# --- refusals ---------------------------------------------------------------

def test_coarse_grid_refused():
    with pytest.raises(OracleError):
        solve_capacity(teichmuller(), h=0.5, config=FAST)


def test_intersecting_plates_refused():
    spec = CondenserSpec((Segment(-1 + 0j, 1 + 0j),), (Segment(-1j, 1j),))
    with pytest.raises(OracleError):
        solve_capacity(spec, h=0.05, config=FAST)


def test_plates_outside_box_refused():
    spec = CondenserSpec((Segment(-1 + 0j, 0j),), (Segment(1 + 0j, 2 + 0j),),
                         box=(-0.5, 0.5, -0.5, 0.5), far_field="insulating")
    with pytest.raises(OracleError):
        solve_capacity(spec, h=0.05, config=FAST)


def test_no_warning_on_clean_sequence():
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        estimate_capacity(teichmuller(), config=FAST)
