import json
from fractions import Fraction

import pytest

from walkmax.errors import CenteringError, InputFileError, MeasureFormatError, NormalizationError, ParameterError
from walkmax.measures import (
    centered_geometric,
    dump_measure,
    from_atoms,
    load_measure,
    parse_measure,
    save_measure,
    uniform_interval_two,
)


class TestFiniteMeasures:
    def test_from_atoms_sorts(self):
        measure = from_atoms([(2, Fraction(1, 4)), (-2, Fraction(1, 4)), (0, Fraction(1, 2))])
        assert measure.support == [-2, 0, 2]
        assert measure.mass(0) == Fraction(1, 2)
        assert measure.mass(1) == 0
        assert measure.tail_mass(-2) == Fraction(3, 4)

    def test_normalization(self):
        with pytest.raises(NormalizationError):
            from_atoms([(-1, Fraction(1, 2)), (1, Fraction(1, 3))])

    def test_centering(self):
        with pytest.raises(CenteringError):
            from_atoms([(0, Fraction(1, 2)), (1, Fraction(1, 2))])

    @pytest.mark.parametrize(
        "atoms",
        [[], [(0, Fraction(1, 2)), (0, Fraction(1, 2))], [(-1, Fraction(1)), (1, Fraction(0))], [(0.5, Fraction(1))]],
    )
    def test_malformed_atoms(self, atoms):
        with pytest.raises(MeasureFormatError):
            from_atoms(atoms)

    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_uniform_interval_two(self, n):
        measure = uniform_interval_two(n)
        assert measure.support == list(range(-2 * n, 2 * n + 1, 2))
        assert all(mass == Fraction(1, 2 * n + 1) for _, mass in measure.atoms)
        assert measure.mean() == 0


class TestGeometric:
    def test_truncation_point(self):
        measure = centered_geometric(1, Fraction(1, 2**20))
        assert measure.support[0] == -1
        assert measure.support[-1] == 19
        assert 1 - measure.total_mass() == Fraction(1, 2**21)

    def test_closed_form_masses(self):
        one = centered_geometric(1, Fraction(1, 1024))
        assert one.mass(-1) == Fraction(1, 2)
        assert one.mass(0) == Fraction(1, 4)
        assert one.mass(-2) == 0
        assert one.tail_mass(40) == Fraction(1, 2**42)
        two = centered_geometric(2, Fraction(1, 1024))
        assert two.mass(-2) == Fraction(1, 3)
        assert two.mass(-1) == Fraction(2, 9)
        assert two.in_support(10_000)
        assert not two.in_support(-3)

    def test_untruncated_mean_is_zero(self):
        measure = centered_geometric(2, Fraction(1, 2**40))
        assert abs(float(measure.mean())) < 1e-9

    @pytest.mark.parametrize("n, tail", [(0, "1/2"), (1, "0"), (1, "1"), (1, "3/2")])
    def test_rejects_parameters(self, n, tail):
        with pytest.raises(ParameterError):
            centered_geometric(n, tail)


class TestMeasureFiles:
    def test_parse_finite(self):
        text = json.dumps({"kind": "finite", "atoms": [{"x": -2, "mass": "1/3"}, {"x": 1, "mass": "2/3"}]})
        measure = parse_measure(text)
        assert measure.support == [-2, 1]

    def test_parse_geometric(self):
        measure = parse_measure('{"kind": "geometric", "n": 1, "truncation_tail": "1/1048576"}')
        assert measure.kind == "geometric"
        assert measure.support[-1] == 19

    def test_bad_mass_reports_line(self):
        text = '{\n  "kind": "finite",\n  "atoms": [\n    {"x": -1, "mass": "1/2"},\n    {"x": 1, "mass": "0.5"}\n  ]\n}\n'
        with pytest.raises(InputFileError) as info:
            parse_measure(text, "m.json")
        assert info.value.line == 5
        assert str(info.value).startswith("m.json:5:")

    def test_invalid_json_reports_line_and_column(self):
        with pytest.raises(InputFileError) as info:
            parse_measure('{"kind": "finite",\n "atoms": [}', "broken.json")
        assert info.value.line == 2
        assert info.value.column is not None

    def test_duplicate_atom_reports_line(self):
        text = '{"kind": "finite", "atoms": [\n{"x": 0, "mass": "1/2"},\n{"x": 0, "mass": "1/2"}\n]}'
        with pytest.raises(InputFileError) as info:
            parse_measure(text)
        assert info.value.line == 3

    @pytest.mark.parametrize(
        "payload",
        [
            {"kind": "finite", "atoms": [{"x": 0, "mass": "1"}], "comment": "x"},
            {"kind": "finite", "atoms": [{"x": 0, "mass": "1", "weight": 2}]},
            {"kind": "geometric", "n": 1},
            {"kind": "poisson", "rate": "1"},
            {"kind": "finite", "atoms": [{"x": "0", "mass": "1"}]},
        ],
    )
    def test_rejects_schema_violations(self, payload):
        with pytest.raises(InputFileError):
            parse_measure(json.dumps(payload))

    def test_centering_error_passes_through(self):
        with pytest.raises(CenteringError):
            parse_measure('{"kind": "finite", "atoms": [{"x": 0, "mass": "1/2"}, {"x": 2, "mass": "1/2"}]}')

    def test_save_and_load(self, tmp_path):
        path = tmp_path / "uniform.json"
        save_measure(uniform_interval_two(2), path)
        assert load_measure(path) == uniform_interval_two(2)
        assert dump_measure(centered_geometric(1, Fraction(1, 64))) == {
            "kind": "geometric",
            "n": 1,
            "truncation_tail": "1/64",
        }

    def test_missing_file(self, tmp_path):
        with pytest.raises(InputFileError, match="file not found"):
            load_measure(tmp_path / "nope.json")


def test_has_no_module_logger():
    from walkmax import measures

    assert not hasattr(measures, "logger")
