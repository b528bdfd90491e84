"""Model file parsing, serialization round trips, and builtin models."""

import math

import pytest

from orbitflow import (
    ModelSyntaxError,
    UnknownModel,
    ValidationError,
    builtin_model,
    generation_check,
    lattice_length_heuristic,
    load_model,
    parse_model,
    serialize_model,
)

SAMPLE = """\
[model]
name = full2
b = 0
n_removed = 1
vertices = 2
[edge] from=1 to=1 roof=1.0 class=0
[edge] from=1 to=2 roof=1.0 class=0
[edge] from=2 to=1 roof=1.0 class=0
[edge] from=2 to=2 roof=1.0 class=1
[removed] cycle = 2
"""


class TestParse:
    def test_sample_file(self):
        m = parse_model(SAMPLE)
        assert m.name == "full2"
        assert m.graph.vertex_count == 2
        assert len(m.graph.edges) == 4
        assert m.weights.dimension == 1
        assert m.weights.classes[(2, 2)] == (1,)
        assert [c.vertices for c in m.removed] == [(2,)]

    def test_zero_roof_rejected(self):
        bad = SAMPLE.replace("from=1 to=1 roof=1.0", "from=1 to=1 roof=0.0")
        with pytest.raises(ValidationError, match="roof must be positive"):
            parse_model(bad)

    def test_nonprimitive_removed_rejected(self):
        bad = SAMPLE.replace("cycle = 2", "cycle = 1,2,1,2")
        with pytest.raises(ValidationError, match="repetition"):
            parse_model(bad)

    def test_syntax_error_carries_line_number(self):
        bad = SAMPLE + "???\n"
        with pytest.raises(ModelSyntaxError, match="line 11"):
            parse_model(bad)

    def test_data_before_section(self):
        with pytest.raises(ModelSyntaxError, match="line 1"):
            parse_model("name = x\n")

    def test_comments_and_blank_lines(self):
        text = "# header comment\n\n" + SAMPLE.replace(
            "[removed] cycle = 2", "[removed] cycle = 2  # the meridian orbit"
        )
        assert parse_model(text).name == "full2"

    def test_log_literal_roof(self):
        text = SAMPLE.replace("from=1 to=1 roof=1.0", "from=1 to=1 roof=log(2)")
        m = parse_model(text)
        assert m.weights.roof[(1, 1)] == math.log(2)
        assert m.roof_literals[(1, 1)] == "log(2)"

    def test_wrong_class_dimension(self):
        bad = SAMPLE.replace("from=2 to=2 roof=1.0 class=1",
                             "from=2 to=2 roof=1.0 class=1,0")
        with pytest.raises(ValidationError, match="length"):
            parse_model(bad)

    def test_invalid_graph_reported(self):
        bad = "\n".join(
            line for line in SAMPLE.splitlines() if "from=2 to=1" not in line
        )
        with pytest.raises(ValidationError, match="strongly connected|out-degree|in-degree"):
            parse_model(bad)

    def test_removed_count_mismatch_warns(self):
        text = SAMPLE.replace("[removed] cycle = 2\n", "")
        with pytest.warns(UserWarning, match="n_removed"):
            parse_model(text)

    def test_chords_block(self):
        text = """\
[model]
name = chordy
b = 0
n_removed = 1
vertices = 2
[edge] from=1 to=1 roof=1.0
[edge] from=1 to=2 roof=1.0
[edge] from=2 to=1 roof=1.0
[edge] from=2 to=2 roof=1.0
[chords] tree=1>2
chord = 1>1:0
chord = 2>2:1
chord = 2>1:0
[removed] cycle = 2
"""
        m = parse_model(text)
        assert m.chords is not None
        assert m.weights.classes[(2, 2)] == (1,)
        assert m.weights.classes[(1, 2)] == (0,)

    def test_class_with_chords_rejected(self):
        text = SAMPLE.replace(
            "[removed]", "[chords] tree=1>2\nchord = 1>1:0\nchord = 2>2:1\nchord = 2>1:0\n[removed]"
        )
        with pytest.raises(ValidationError, match="chords"):
            parse_model(text)

    def test_quotient_section(self):
        text = SAMPLE + "[quotient] name=mod3 lattice=3\n"
        m = parse_model(text)
        assert m.quotients == {"mod3": ((3,),)}
        assert m.quotient("mod3").order == 3


class TestRoundTrip:
    @pytest.mark.parametrize("name", ["full2", "goldenmean", "bench3"])
    def test_parse_serialize_parse(self, name):
        m = builtin_model(name)
        text = serialize_model(m)
        again = parse_model(text)
        assert again == m
        assert serialize_model(again) == text

    def test_sample_roundtrip(self):
        m = parse_model(SAMPLE)
        assert parse_model(serialize_model(m)) == m

    def test_edge_order_preserved(self):
        shuffled = """\
[model]
name = shuffled
b = 1
n_removed = 0
vertices = 2
[edge] from=2 to=2 roof=1.0 class=1
[edge] from=1 to=2 roof=2.0 class=0
[edge] from=2 to=1 roof=1.5 class=0
[edge] from=1 to=1 roof=1.0 class=0
"""
        m = parse_model(shuffled)
        assert m.graph.edges == ((2, 2), (1, 2), (2, 1), (1, 1))
        assert parse_model(serialize_model(m)).graph.edges == m.graph.edges


class TestBuiltins:
    def test_full2_shape(self, full2):
        assert len(full2.graph.edges) == 4
        assert full2.weights.dimension == 1
        assert [c.vertices for c in full2.removed] == [(2,)]

    def test_goldenmean_shape(self, goldenmean):
        assert len(goldenmean.graph.edges) == 3
        assert goldenmean.b == 1 and goldenmean.n_removed == 0

    def test_bench3_generates(self, bench3):
        res = generation_check(bench3.graph, bench3.weights, 6)
        assert res.generates

    def test_bench3_no_lattice_flags(self, bench3):
        grid = [0.1 * i for i in range(1, 11)]
        assert lattice_length_heuristic(bench3.graph, bench3.weights, 6, grid) == []

    def test_bench3_roofs_are_prime_logs(self, bench3):
        primes = (2, 3, 5, 7, 11, 13, 17, 19, 23)
        for e, p in zip(bench3.graph.edges, primes):
            assert bench3.weights.roof[e] == math.log(p)

    def test_unknown_name(self):
        with pytest.raises(UnknownModel):
            builtin_model("mystery")


class TestLoadModel:
    def test_builtin_passthrough(self):
        assert load_model("full2").name == "full2"

    def test_file_path(self, tmp_path):
        p = tmp_path / "m.model"
        p.write_text(SAMPLE)
        assert load_model(str(p)).name == "full2"

    def test_missing_source(self):
        with pytest.raises(UnknownModel):
            load_model("no-such-model-or-file")
