import io
import json
import math

import pytest
from hypothesis import given, settings

from sepcover.instance import (
    PROFILES,
    CoverageInstance,
    HalfplaneInstance,
    HittingInstance,
    InstanceFormatError,
    Solution,
    coverage_to_hitting,
    dumps,
    generate,
    generate_halfplanes,
    generate_hitting,
    hitting_to_coverage,
    loads,
    read,
    validate,
    write,
)

from conftest import small_instances

MINIMAL = '{"radius":1,"points":[[0,0.5]],"disks":[{"center":[0,-0.1],"weight":3}]}'


class TestValidate:
    def test_point_below_line(self):
        inst = CoverageInstance(1, [(0, -0.1)], [(0, -0.2)], [1])
        rep = validate(inst)
        assert not rep.ok
        assert "point-below-line" in rep.kinds()
        assert any("below the line" in line for line in rep.lines())

    def test_x_tie_is_a_warning(self):
        inst = CoverageInstance(1, [(0, 0.1), (0, 0.3)], [(0, -0.2)], [1])
        rep = validate(inst)
        assert rep.ok
        assert "x-tie" in rep.kinds()

    def test_well_formed_is_empty(self):
        assert not validate(loads(MINIMAL))

    def test_center_above_line(self):
        assert "center-above-line" in validate(CoverageInstance(1, [(0, 0.1)], [(0, 0.2)], [1])).kinds()

    @pytest.mark.parametrize("w", [0, -1, math.nan])
    def test_bad_weight(self, w):
        assert not validate(CoverageInstance(1, [(0, 0.1)], [(0, -0.2)], [w])).ok

    def test_duplicate_points_rejected(self):
        rep = validate(CoverageInstance(1, [(0, 0.1), (0, 0.1)], [(0, -0.2)], [1]))
        assert "duplicate-point" in rep.kinds()

    def test_uncovered_point_warned(self):
        rep = validate(CoverageInstance(1, [(0, 0.1), (9, 0.1)], [(0, -0.2)], [1]))
        assert rep.ok and "uncovered" in rep.kinds()

    def test_boundary_flagged_in_exact_mode_only(self):
        inst = CoverageInstance(1, [(0, 0.0)], [(0, -1.0)], [1])
        assert "on-boundary" not in validate(inst).kinds()
        assert "on-boundary" in validate(inst, exact=True).kinds()


class TestGenerate:
    def test_single(self):
        a = generate(1, 1, seed=7)
        assert (a.n, a.m) == (1, 1)
        assert a == generate(1, 1, seed=7)

    def test_byte_identical(self):
        assert dumps(generate(100, 100, seed=1)) == dumps(generate(100, 100, seed=1))

    def test_infeasible_flag(self):
        inst = generate(20, 20, seed=4, infeasible=True)
        assert "uncovered" in validate(inst).kinds()

    @pytest.mark.parametrize("profile", PROFILES)
    def test_profiles_are_valid_and_covered(self, profile):
        for seed in range(5):
            rep = validate(generate(30, 25, seed, profile))
            assert rep.ok
            assert "uncovered" not in rep.kinds()

    def test_bad_arguments(self):
        with pytest.raises(ValueError):
            generate(0, 3, 1)
        with pytest.raises(ValueError):
            generate(3, 3, 1, profile="nope")

    def test_other_generators(self):
        assert generate_hitting(5, 6, 1).m == 6
        hp = generate_halfplanes(5, 6, 1)
        assert hp.n == 5 and hp.lower_only


class TestSerialization:
    def test_minimal_document(self):
        inst = loads(MINIMAL)
        assert (inst.n, inst.m) == (1, 1)
        assert inst.weights == (3.0,)

    def test_missing_weight_names_field(self):
        with pytest.raises(InstanceFormatError, match="weight"):
            loads('{"radius":1,"points":[[0,0.5]],"disks":[{"center":[0,-0.1]}]}')

    def test_malformed_json_position(self):
        with pytest.raises(InstanceFormatError, match="line 1"):
            loads('{"radius":1,')

    def test_round_trip(self, tmp_path):
        inst = generate(50, 50, seed=3)
        path = tmp_path / "i.json"
        write(inst, path)
        assert read(path) == inst
        buf = io.StringIO()
        write(inst, buf)
        assert loads(buf.getvalue()) == inst

    def test_hitting_and_halfplane_round_trip(self):
        hit = generate_hitting(4, 5, 2)
        assert loads(dumps(hit)) == hit
        hp = HalfplaneInstance([(0, 1)], [(1, 2), (0, 5)], [1, 2], ("lower", "upper"))
        assert loads(dumps(hp)) == hp

    def test_bad_side(self):
        with pytest.raises(InstanceFormatError, match="side"):
            loads('{"points":[[0,0]],"halfplanes":[{"a":0,"b":1,"weight":1,"side":"left"}]}')

    def test_reproducer_wrapper(self):
        assert loads(json.dumps({"instance": json.loads(MINIMAL), "problems": []})).n == 1

    def test_solution_inf_is_string(self):
        sol = Solution.infeasible([1.0, math.inf])
        doc = json.loads(json.dumps(sol.to_dict()))
        assert doc["delta"] == "inf"
        assert doc["prefix"] == [1, "inf"]
        assert Solution.from_dict(doc).total_weight == math.inf

    @settings(max_examples=40, deadline=None)
    @given(small_instances())
    def test_round_trip_property(self, inst):
        assert loads(dumps(inst)) == inst


def test_hitting_conversion_is_an_involution():
    inst = generate(6, 7, 5)
    assert hitting_to_coverage(coverage_to_hitting(inst)) == inst
    hit = coverage_to_hitting(inst)
    assert isinstance(hit, HittingInstance) and hit.n == inst.m
