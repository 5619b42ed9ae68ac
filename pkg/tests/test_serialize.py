import json
import math

import numpy as np
import pytest
import scipy.sparse

from qspec import Fluxonium, GridBasis, Oscillator, Transmon, ZeroPi
from qspec.composite import ExpressionTerm, HilbertSpaceDef, ProductTerm, RawMatrixTerm
from qspec.serialize import (
    SpecFileError,
    canonical_dumps,
    export_hamiltonian,
    hilbertspace_from_json,
    hilbertspace_to_json,
    matrix_from_json,
    matrix_to_json,
    qubit_from_json,
    qubit_to_json,
    sweep_from_json,
    sweep_to_json,
    validate_qubit_json,
    validate_units,
)
from qspec.sweep import ParamBinding, SweepDef


class TestCanonicalJson:
    def test_sorted_and_compact(self):
        assert canonical_dumps({"b": 1, "a": 2}) == '{"a":2,"b":1}'

    def test_infinity_as_string(self):
        assert canonical_dumps({"t": math.inf}) == '{"t":"inf"}'
        assert canonical_dumps({"t": -math.inf}) == '{"t":"-inf"}'

    def test_nan_as_null(self):
        assert canonical_dumps({"x": math.nan}) == '{"x":null}'

    def test_numpy_and_complex(self):
        out = json.loads(canonical_dumps({"a": np.array([1.5, 2.5]), "z": 1 + 2j}))
        assert out == {"a": [1.5, 2.5], "z": {"re": 1.0, "im": 2.0}}

    def test_deterministic(self):
        payload = {"values": np.linspace(0, 1, 7).tolist(), "name": "x"}
        assert canonical_dumps(payload) == canonical_dumps(json.loads(canonical_dumps(payload)))


class TestMatrixCodec:
    def test_dense_round_trip(self):
        m = np.array([[1.0, 2.0 + 1j], [2.0 - 1j, 3.0]])
        back = matrix_from_json(matrix_to_json(m))
        assert np.allclose(back, m)

    def test_real_dense_omits_imag(self):
        doc = matrix_to_json(np.eye(2))
        assert "im" not in doc

    def test_coo_round_trip(self):
        m = scipy.sparse.random(8, 8, density=0.2, random_state=1, dtype=float)
        h = (m + m.T).tocsr()
        back = matrix_from_json(matrix_to_json(h))
        assert scipy.sparse.issparse(back)
        assert np.allclose(back.toarray(), h.toarray())

    def test_unknown_kind(self):
        with pytest.raises(SpecFileError):
            matrix_from_json({"kind": "csv"})


class TestQubitCodec:
    @pytest.mark.parametrize(
        "spec",
        [
            Transmon(EJ=30.02, EC=0.2, ng=0.1, ncut=31, truncated_dim=5),
            Fluxonium(EJ=2.55, EC=0.72, EL=0.12, flux=0.5, cutoff=110),
            Oscillator(E_osc=4.5, l_osc=0.3, truncated_dim=4),
            ZeroPi(EJ=10.0, EL=0.04, ECJ=20.0, EC=0.04, ng=0.3, flux=0.2,
                   grid=GridBasis(-8 * math.pi, 8 * math.pi, 40), ncut=5),
        ],
    )
    def test_round_trip(self, spec):
        assert qubit_from_json(qubit_to_json(spec)) == spec

    def test_unknown_family(self):
        with pytest.raises(SpecFileError) as err:
            qubit_from_json({"family": "qutrit", "params": {}})
        assert "family" in str(err.value)

    def test_unknown_parameter(self):
        with pytest.raises(SpecFileError):
            qubit_from_json({"family": "transmon",
                             "params": {"EJ": 1.0, "EC": 1.0, "bogus": 2}})


class TestHilbertSpaceCodec:
    def test_round_trip_all_interaction_kinds(self):
        q = Transmon(EJ=20.0, EC=0.5, ng=0.0, ncut=10, truncated_dim=3)
        osc = Oscillator(E_osc=5.0, truncated_dim=3)
        x = np.diag(np.sqrt([1.0, 2.0]), 1) + np.diag(np.sqrt([1.0, 2.0]), -1)
        hs = HilbertSpaceDef(
            (q, osc),
            (
                ProductTerm(g=0.1, factors=(("n_operator", 0), (x, 1))),
                ExpressionTerm(expr="g * n * x",
                               bindings=(("n", "n_operator", 0), ("x", x, 1)),
                               constants=(("g", 0.05),), add_hc=False),
                RawMatrixTerm(np.zeros((9, 9))),
            ),
        )
        back = hilbertspace_from_json(hilbertspace_to_json(hs))
        assert back.subsystems == hs.subsystems
        assert len(back.interactions) == 3
        from qspec.composite import assemble_hamiltonian

        assert np.allclose(
            assemble_hamiltonian(back).matrix, assemble_hamiltonian(hs).matrix
        )

    def test_missing_subsystems(self):
        with pytest.raises(SpecFileError):
            hilbertspace_from_json({"interactions": []})


class TestSweepCodec:
    def test_round_trip(self):
        q = Transmon(EJ=20.0, EC=0.5, ng=0.0, ncut=10, truncated_dim=3)
        hs = HilbertSpaceDef((q,))
        sd = SweepDef(
            hilbertspace=hs,
            axes=(("ng", np.linspace(-1, 1, 5)),),
            bindings=(ParamBinding(0, "ng", "ng"),),
            evals_count=3,
            subsys_update_info=(("ng", (0,)),),
            worker_count=2,
        )
        back = sweep_from_json(sweep_to_json(sd))
        assert back.axis_names == ("ng",)
        assert np.allclose(back.axes[0][1], sd.axes[0][1])
        assert back.bindings == sd.bindings
        assert back.subsys_update_info == sd.subsys_update_info
        assert back.worker_count == 2

    def test_linspace_shorthand(self):
        obj = {
            "hilbertspace": {"subsystems": [
                {"family": "generic_qubit", "params": {"E": 5.0}}
            ]},
            "axes": [{"name": "E", "values": {"start": 1, "stop": 2, "num": 11}}],
            "bindings": [{"subsystem": 0, "field": "E", "axis": "E"}],
            "evals_count": 2,
        }
        sd = sweep_from_json(obj)
        assert len(sd.axes[0][1]) == 11

    def test_invalid_definition_reported(self):
        obj = {
            "hilbertspace": {"subsystems": [
                {"family": "generic_qubit", "params": {"E": 5.0}}
            ]},
            "axes": [{"name": "E", "values": [1.0, 0.5, 2.0]}],
            "bindings": [{"subsystem": 0, "field": "E", "axis": "E"}],
        }
        with pytest.raises(SpecFileError):
            sweep_from_json(obj)


class TestExportHamiltonian:
    def test_zero_coupling_is_diagonal(self):
        hs = HilbertSpaceDef(
            (Oscillator(E_osc=2.0, truncated_dim=3),
             Oscillator(E_osc=5.0, truncated_dim=2))
        )
        doc = export_hamiltonian(hs, "GHz")
        assert doc["format"] == "qspec-hamiltonian/1"
        assert doc["subsystem_dims"] == [3, 2]
        matrix = matrix_from_json(doc["matrix"])
        dense = matrix.toarray() if scipy.sparse.issparse(matrix) else matrix
        assert np.allclose(dense, np.diag(np.diag(dense)))
        # row-major ordering: last subsystem fastest
        assert np.allclose(np.diag(dense), [0, 5, 2, 7, 4, 9])

    def test_large_system_uses_sparse(self):
        hs = HilbertSpaceDef(
            (Oscillator(E_osc=2.0, truncated_dim=9),
             Oscillator(E_osc=5.0, truncated_dim=9))
        )
        doc = export_hamiltonian(hs, "GHz")
        assert doc["matrix"]["kind"] == "coo"


class TestValidationReport:
    def test_ncut_warning(self):
        report = validate_qubit_json(
            {"family": "transmon", "params": {"EJ": 30.02, "EC": 0.2, "ncut": 5}}
        )
        assert report["errors"] == []
        assert any("ncut" in w and "8" in w for w in report["warnings"])

    def test_valid_file_empty_findings(self):
        report = validate_qubit_json(
            {"family": "transmon", "params": {"EJ": 30.0, "EC": 0.2, "ncut": 40}}
        )
        assert report == {"errors": [], "warnings": []}

    def test_negative_ec_names_field(self):
        report = validate_qubit_json(
            {"family": "transmon", "params": {"EJ": 30.0, "EC": -0.2, "ncut": 40}}
        )
        assert report["errors"] and "EC" in report["errors"][0]

    def test_units_validation(self):
        assert validate_units("MHz") == "MHz"
        with pytest.raises(SpecFileError):
            validate_units("eV")
