import dataclasses

import numpy as np
import pytest

from qspec import GenericQubit, Oscillator, TunableTransmon
from qspec.composite import DispersiveBreakdownError, HilbertSpaceDef, ProductTerm
from qspec.grids import NamedGridArray, UnknownAxisError
from qspec.sweep import (
    ParamBinding,
    SweepDef,
    SweepDefinitionError,
    SweepPointFailure,
    run_sweep,
    specs_at_point,
    transitions,
)


def x_operator(dim):
    a = np.diag(np.sqrt(np.arange(1.0, dim)), 1)
    return a + a.T


def two_qubit_def(g1=0.1, g2=0.2):
    tmon1 = TunableTransmon(EJmax=40.0, EC=0.2, d=0.1, flux=0.0, ng=0.3, ncut=20,
                            truncated_dim=3)
    tmon2 = TunableTransmon(EJmax=15.0, EC=0.15, d=0.2, flux=0.0, ng=0.0, ncut=20,
                            truncated_dim=3)
    resonator = Oscillator(E_osc=4.5, truncated_dim=3)
    terms = []
    if g1:
        terms.append(ProductTerm(g=g1, factors=(("n_operator", 0), (x_operator(3), 2))))
    if g2:
        terms.append(ProductTerm(g=g2, factors=(("n_operator", 1), (x_operator(3), 2))))
    return HilbertSpaceDef((tmon1, tmon2, resonator), tuple(terms))


def paper_shaped_sweep(hs, worker_count=1, info=True, evals_count=10):
    return SweepDef(
        hilbertspace=hs,
        axes=(("flux", np.linspace(0.0, 2.0, 21)), ("ng", np.linspace(-0.5, 0.5, 9))),
        bindings=(
            ParamBinding(0, "flux", "flux", scale=1.0),
            ParamBinding(1, "flux", "flux", scale=1.2),  # SQUID-loop area ratio
            ParamBinding(1, "ng", "ng"),
        ),
        evals_count=evals_count,
        subsys_update_info=(("flux", (0, 1)), ("ng", (1,))) if info else None,
        worker_count=worker_count,
    )


@pytest.fixture(scope="module")
def sweep_result():
    return run_sweep(paper_shaped_sweep(two_qubit_def()))


class TestNamedGridArray:
    def test_shape_validation(self):
        with pytest.raises(ValueError):
            NamedGridArray((("x", np.arange(3)),), np.zeros((4, 2)))

    def test_nearest_rule_ties_to_lower(self):
        grid = NamedGridArray((("x", np.array([0.0, 1.0, 2.0])),), np.arange(3.0))
        assert grid.nearest_index("x", 0.5) == 0  # midway tie -> lower index
        assert grid.nearest_index("x", 0.51) == 1
        assert grid.nearest_index("x", 1.0) == 1  # exact on-grid

    def test_unknown_axis(self):
        grid = NamedGridArray((("x", np.arange(3.0)),), np.arange(3.0))
        with pytest.raises(UnknownAxisError):
            grid.axis_values("y")


class TestSweepDefinition:
    def test_duplicate_axis_names(self):
        hs = two_qubit_def()
        with pytest.raises(SweepDefinitionError):
            SweepDef(hs, (("a", np.arange(2.0)), ("a", np.arange(2.0))),
                     (ParamBinding(0, "flux", "a"),))

    def test_non_monotonic_axis(self):
        hs = two_qubit_def()
        with pytest.raises(SweepDefinitionError):
            SweepDef(hs, (("a", np.array([0.0, 2.0, 1.0])),),
                     (ParamBinding(0, "flux", "a"),))

    def test_binding_field_validated(self):
        hs = two_qubit_def()
        with pytest.raises(SweepDefinitionError):
            SweepDef(hs, (("a", np.arange(2.0)),),
                     (ParamBinding(0, "nonsense", "a"),))

    def test_update_info_consistency(self):
        hs = two_qubit_def()
        with pytest.raises(SweepDefinitionError):
            SweepDef(
                hs, (("flux", np.arange(2.0)),),
                (ParamBinding(0, "flux", "flux"), ParamBinding(1, "flux", "flux")),
                subsys_update_info=(("flux", (0,)),),  # omits subsystem 1
            )

    def test_specs_at_point_affine(self):
        hs = two_qubit_def()
        sd = paper_shaped_sweep(hs)
        specs = specs_at_point(sd, {"flux": 0.5, "ng": 0.2})
        assert specs[0].flux == pytest.approx(0.5)
        assert specs[1].flux == pytest.approx(0.6)
        assert specs[1].ng == pytest.approx(0.2)
        assert specs[2] is hs.subsystems[2]


class TestRunSweep:
    def test_shapes(self, sweep_result):
        assert sweep_result["evals"].payload.shape == (21, 9, 10)
        assert sweep_result["evecs"].payload.shape == (21, 9, 27, 10)
        assert sweep_result["labels"].payload.shape == (21, 9, 10, 3)
        assert sweep_result["lamb"].payload.shape == (21, 9, 3, 3)
        assert sweep_result["chi"].payload.shape == (21, 9, 3, 3, 3, 3)
        assert sweep_result["kerr"].payload.shape == (21, 9, 3, 3)
        assert sweep_result["bare_evals"][2].payload.shape == (21, 9, 3)

    def test_single_point_equals_direct(self):
        hs = two_qubit_def()
        sd = SweepDef(
            hilbertspace=hs,
            axes=(("flux", np.array([0.3])), ("ng", np.array([0.1]))),
            bindings=(
                ParamBinding(0, "flux", "flux"),
                ParamBinding(1, "flux", "flux", scale=1.2),
                ParamBinding(1, "ng", "ng"),
            ),
            evals_count=8,
        )
        result = run_sweep(sd)
        from qspec.composite import dressed_eigensys
        from qspec.sweep import hilbertspace_at_point

        direct = dressed_eigensys(
            hilbertspace_at_point(sd, {"flux": 0.3, "ng": 0.1}), 8
        )
        assert np.array_equal(result["evals"].payload[0, 0], direct.evals)

    def test_worker_count_determinism(self, sweep_result):
        parallel = run_sweep(
            paper_shaped_sweep(two_qubit_def(), worker_count=4)
        )
        for key in ("evals", "evecs", "labels", "overlaps"):
            assert np.array_equal(
                sweep_result[key].payload, parallel[key].payload
            )
        for key in ("lamb", "chi", "kerr"):
            assert np.array_equal(
                sweep_result[key].payload, parallel[key].payload, equal_nan=True
            )

    def test_reuse_equals_recomputation(self, sweep_result):
        no_info = run_sweep(paper_shaped_sweep(two_qubit_def(), info=False))
        assert np.array_equal(sweep_result["evals"].payload, no_info["evals"].payload)
        for s in range(3):
            assert np.array_equal(
                sweep_result["bare_evals"][s].payload,
                no_info["bare_evals"][s].payload,
            )

    def test_point_failure_carries_coordinates(self):
        hs = two_qubit_def()
        sd = SweepDef(
            hilbertspace=hs,
            axes=(("flux", np.array([0.0, 10.0])),),
            # scale drives ng far outside any physical value to force failure?
            # instead bind flux onto truncated_dim, which must stay integral
            bindings=(ParamBinding(0, "EC", "flux", scale=-1.0, offset=0.1),),
            evals_count=4,
        )
        with pytest.raises(SweepPointFailure) as err:
            run_sweep(sd)
        assert err.value.coordinates == {"flux": 10.0}


class TestSlicing:
    def test_slice_by_value_nearest(self, sweep_result):
        line = sweep_result.slice("ng", value=0.01)
        assert line.axis_names == ("flux",)
        assert line.fixed == {"ng": 4}  # 0.01 is nearest to grid value 0.0

    def test_slice_commutes(self, sweep_result):
        a = sweep_result.slice("ng", value=0.0).slice("flux", value=1.0)
        b = sweep_result.slice("flux", value=1.0).slice("ng", value=0.0)
        assert np.array_equal(a["evals"].payload, b["evals"].payload)
        assert a.fixed == b.fixed

    def test_value_and_index_slicing_agree(self, sweep_result):
        by_value = sweep_result.slice("flux", value=0.5)
        by_index = sweep_result.slice("flux", index=5)
        assert np.array_equal(by_value["evals"].payload, by_index["evals"].payload)

    def test_all_axes_sliced(self, sweep_result):
        point = sweep_result.slice("ng", value=0.0).slice("flux", value=0.0)
        assert point.axis_names == ()
        assert point["evals"].payload.shape == (10,)
        assert point.point_values() == {"ng": 0.0, "flux": 0.0}

    def test_unknown_axis(self, sweep_result):
        with pytest.raises(UnknownAxisError):
            sweep_result.slice("voltage", value=0.0)


@pytest.fixture(scope="module")
def uncoupled_line():
    result = run_sweep(paper_shaped_sweep(two_qubit_def(g1=0.0, g2=0.0),
                                          evals_count=12))
    return result.slice("ng", value=0.0)


class TestTransitions:
    def test_zero_coupling_equals_bare_differences(self, uncoupled_line):
        ts = transitions(uncoupled_line)
        bare = [g.payload for g in uncoupled_line["bare_evals"]]
        for branch in ts.transitions:
            if branch.kind != "subsystem":
                continue
            s = branch.subsystem
            level = branch.final[s]
            expected = bare[s][:, level] - bare[s][:, 0]
            mask = ~np.isnan(branch.energies)
            assert np.allclose(branch.energies[mask], expected[mask], atol=1e-12)

    def test_photon_number_halves_exactly(self, uncoupled_line):
        one = transitions(uncoupled_line, photon_number=1)
        two = transitions(uncoupled_line, photon_number=2)
        for b1, b2 in zip(one.transitions, two.transitions):
            assert np.array_equal(b1.energies / 2.0, b2.energies, equal_nan=True)

    def test_ground_to_first_branch_present(self, uncoupled_line):
        ts = transitions(uncoupled_line)
        finals = {b.final for b in ts.transitions}
        assert (1, 0, 0) in finals

    def test_subsystem_filter(self, uncoupled_line):
        ts = transitions(uncoupled_line, subsystems=[0])
        assert all(b.subsystem == 0 for b in ts.transitions)

    def test_sidebands_excluded_by_default(self, uncoupled_line):
        default = transitions(uncoupled_line)
        assert all(b.kind == "subsystem" for b in default.transitions)
        with_sidebands = transitions(uncoupled_line, sidebands=True)
        assert any(b.kind == "sideband" for b in with_sidebands.transitions)

    def test_plain_coloring(self, uncoupled_line):
        ts = transitions(uncoupled_line, coloring="plain")
        assert all(b.final is None for b in ts.transitions)
        assert len(ts.transitions) == 12

    def test_excited_initial_state(self, uncoupled_line):
        ts = transitions(uncoupled_line, initial=(1, 0, 0))
        assert ts.initial == (1, 0, 0)
        downward = [b for b in ts.transitions if b.final == (0, 0, 0)]
        assert downward and np.nanmax(downward[0].energies) < 0

    def test_needs_single_axis(self, sweep_result):
        with pytest.raises(ValueError):
            transitions(sweep_result)

    def test_initial_unresolvable_raises(self):
        q = GenericQubit(E=5.0)
        osc = Oscillator(E_osc=5.0, truncated_dim=2)
        hs = HilbertSpaceDef(
            (q, osc),
            (ProductTerm(g=0.05, factors=(("sx_operator", 0), (x_operator(2), 1))),),
        )
        sd = SweepDef(
            hilbertspace=hs,
            axes=(("E", np.array([4.9, 5.0, 5.1])),),
            bindings=(ParamBinding(0, "E", "E"),),
            evals_count=2,  # the doubly excited state is never computed
        )
        result = run_sweep(sd)
        with pytest.raises(DispersiveBreakdownError):
            transitions(result, initial=(1, 1))


class TestCustomSweep:
    def test_ground_energy_duplicates_evals(self, sweep_result):
        result = run_sweep(paper_shaped_sweep(two_qubit_def()))
        result.add_custom("ground", lambda ctx: ctx["evals"][0])
        assert np.array_equal(
            result["ground"].payload, result["evals"].payload[..., 0]
        )

    def test_gap_cross_checks_transitions(self):
        result = run_sweep(paper_shaped_sweep(two_qubit_def(), evals_count=12))
        result.add_custom("gap", lambda ctx: ctx["evals"][1] - ctx["evals"][0])
        line = result.slice("ng", value=0.0)
        ts = transitions(line, coloring="plain")
        # the lowest plain branch above zero is E1 - E0
        gap_branch = ts.transitions[1].energies
        assert np.allclose(line["gap"].payload, gap_branch, atol=1e-12)

    def test_constant_function(self, sweep_result):
        result = run_sweep(paper_shaped_sweep(two_qubit_def()))
        result.add_custom("ones", lambda ctx: 1.0)
        assert np.array_equal(result["ones"].payload, np.ones((21, 9)))

    def test_name_collision(self, sweep_result):
        result = run_sweep(paper_shaped_sweep(two_qubit_def()))
        with pytest.raises(ValueError):
            result.add_custom("evals", lambda ctx: 0.0)


class TestStoredEigenInvariants:
    def test_sampled_residuals_and_orthonormality(self, sweep_result):
        from qspec.composite import assemble_hamiltonian
        from qspec.sweep import hilbertspace_at_point

        rng = np.random.default_rng(3)
        shape = sweep_result.sweep.grid_shape
        for _ in range(4):
            idx = tuple(int(rng.integers(0, n)) for n in shape)
            point = {
                name: float(values[idx[k]])
                for k, (name, values) in enumerate(sweep_result.sweep.axes)
            }
            h = assemble_hamiltonian(hilbertspace_at_point(sweep_result.sweep, point)).matrix
            evals = sweep_result["evals"].payload[idx]
            evecs = sweep_result["evecs"].payload[idx]
            norm = np.linalg.norm(h)
            for k in range(evals.shape[0]):
                residual = h @ evecs[:, k] - evals[k] * evecs[:, k]
                assert np.linalg.norm(residual) <= 1e-8 * norm
            gram = evecs.conj().T @ evecs
            assert np.max(np.abs(gram - np.eye(evals.shape[0]))) < 1e-10
