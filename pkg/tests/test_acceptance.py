"""Exit criteria; each test prints one PASS/FAIL line in the terminal summary."""

import math
import time

import numpy as np
import pytest

from ringwell.core import PHI, RingState, psi_state, ring_energy
from ringwell.energy import delta_E, divergence_scan, energy_ledger, odd_mode_increment, truncated_energy
from ringwell.evolution import TimeGrid, evolve
from ringwell.insertion import build_extended_after, insert_double, insert_single
from ringwell.loclin import consistency_scan, default_alpha_grid, exact_residual_eq9, residual_eq9
from ringwell.overlap import closed_form_coeff, family_oracle, parseval_defect

PI = math.pi
ALPHAS = (PI / 8, PI / 4, 3 * PI / 8)


class Timer:
    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.start


@pytest.mark.criterion(1, "nodal insertion identity")
def test_c1_nodal_insertion_identity():
    with Timer() as t:
        exp = insert_single(PHI, 0.0, 200)
        coeffs = exp.coeffs
        energy_change = abs(truncated_energy(exp) - ring_energy(1))
    assert abs(coeffs[1] - 1.0) < 1e-12
    assert np.abs(np.delete(coeffs, 1)).max() < 1e-12
    assert energy_change < 1e-12
    assert t.elapsed < 1.0


@pytest.mark.criterion(2, "closed forms agree with quadrature oracle")
def test_c2_closed_form_vs_quadrature():
    with Timer() as t:
        worst = 0.0
        for fam in "aAcCbB":
            for alpha in ALPHAS:
                for n in range(1, 51):
                    worst = max(worst, abs(closed_form_coeff(fam, n, alpha) - family_oracle(fam, n, alpha)))
    assert worst < 1e-10
    assert t.elapsed < 30.0


@pytest.mark.criterion(3, "Parseval convergence of the double insertion")
def test_c3_parseval_convergence():
    with Timer() as t:
        defects = [parseval_defect(insert_double(PHI, PI / 4, N), PHI) for N in (10**2, 10**3, 10**4)]
    assert defects[0] > defects[1] > defects[2]
    assert defects[2] < 1e-3
    assert t.elapsed < 10.0


@pytest.mark.criterion(4, "energy-transfer symmetry and non-vanishing transfers")
def test_c4_energy_symmetry():
    with Timer() as t:
        for alpha in ALPHAS:
            phi = energy_ledger(alpha, 50, 50, "phi").table
            psi = energy_ledger(alpha, 50, 50, "psi").table
            assert np.abs(phi - psi).max() <= 1e-12
        assert energy_ledger(PI / 4, 50, 50).min_abs > 0
    assert t.elapsed < 10.0


@pytest.mark.criterion(5, "non-nodal insertion energy diverges")
def test_c5_divergence():
    with Timer() as t:
        N_list = [100, 200, 400, 600, 800, 1000]
        scan = divergence_scan(RingState.cos(), 0.0, N_list)
        energies = [e for _, e in scan]
        increments = odd_mode_increment(scan)
        exact = [(4 * n**4 / (PI**2 * (n**2 - 4) ** 2)) for n in range(101, 1000, 2)]
    assert all(b > a for a, b in zip(energies, energies[1:]))
    for inc in increments:
        assert abs(inc - 4 / PI**2) / (4 / PI**2) < 0.05
    assert energies[-1] - energies[0] == pytest.approx(math.fsum(exact), rel=1e-10)
    assert t.elapsed < 5.0


@pytest.mark.criterion(6, "no-go certification with exact spot checks")
def test_c6_no_go():
    with Timer() as t:
        report = consistency_scan(default_alpha_grid(50, 0.05), 10, 10, threshold=1e-6)
        assert report.verdict == "incompatible"
        floor = 1 - math.sin(PI / 2 - 0.05)
        assert floor > 1e-3
        assert report.min_abs_residual_eq9 >= floor - 1e-15
        for frac, alpha in (("1/6", PI / 6), ("1/4", PI / 4), ("1/3", PI / 3)):
            for n, m in ((1, 1), (1, 2), (2, 2), (3, 4)):
                assert abs(residual_eq9(n, m, alpha) - float(exact_residual_eq9(n, m, frac))) <= 1e-15
        assert abs(residual_eq9(1, 1, PI / 4) - (1 - math.sqrt(2) / 2)) <= 1e-15
    assert t.elapsed < 5.0


@pytest.mark.criterion(7, "derivation chain fidelity")
def test_c7_derivation_chain():
    with Timer() as t:
        report = consistency_scan(default_alpha_grid(50, 0.05), 10, 10)
        for cell in report.cells:
            assert abs(cell.residual_eq5 - cell.residual_eq5_chain) < 1e-12
            assert abs(cell.residual_eq8 - cell.residual_eq8_chain) < 1e-12
    assert report.max_chain_error < 1e-12
    assert t.elapsed < 5.0


@pytest.mark.criterion(8, "unitarity and energy constancy of evolution")
def test_c8_evolution_invariants():
    with Timer() as t:
        expansions = [insert_single(RingState.cos(), 0.0, 500), insert_double(PHI, PI / 4, 500)]
        for exp in expansions:
            chambers = getattr(exp, "chambers", (exp,))
            n0 = math.sqrt(sum(ch.weight for ch in chambers))
            e0 = truncated_energy(exp)
            for time_ in TimeGrid(0.0, 10.0, 100).times:
                later = evolve(exp, float(time_))
                n1 = math.sqrt(sum(ch.weight for ch in getattr(later, "chambers", (later,))))
                assert abs(n1 - n0) < 1e-12
                assert abs(truncated_energy(later) - e0) < 1e-10
    assert t.elapsed < 10.0


@pytest.mark.criterion(9, "energy conservation ledger per extended-state term")
def test_c9_conservation_ledger():
    for state in (PHI, psi_state(PI / 4)):
        for mode in ("per_eigenstate", "per_chamber"):
            ext = build_extended_after(state, PI / 4, 20, mode)
            for term in ext.terms:
                assert term.particle_energy_change + term.barrier0.energy_tag + term.barrierA.energy_tag == 0.0
    ext = build_extended_after(PHI, PI / 4, 20)
    assert {term.particle for term in ext.terms} == {(n, m) for n in range(1, 21) for m in range(1, 21)}
    table = delta_E(*np.meshgrid(np.arange(1, 21), np.arange(1, 21), indexing="ij"), "phi", PI / 4)
    for term in ext.terms:
        n, m = term.particle
        assert term.particle_energy_change == pytest.approx(table[n - 1, m - 1], rel=1e-12)
