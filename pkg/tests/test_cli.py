import contextlib
import io
import json
import math
import os
from pathlib import Path
from unittest import mock

import jsonschema
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tightframe import Frame, errors, parse_frame_file, write_frame
from tightframe import cli
from tightframe.io import frame_to_json, parse_csv_frame, parse_json_frame

GOLDEN = Path(__file__).parent / "golden"
UPDATE = os.environ.get("UPDATE_GOLDEN") == "1"

WORKED = {
    "f2": {"dim": 2, "vectors": [[1, 0], [0, 2]]},
    "f3": {"dim": 3, "vectors": [[1, 0, 0], [0, math.sqrt(2), 0], [0, 0, 2]]},
    "three": {"dim": 2, "vectors": [[1, 0], [0, 1], [1, 1]]},
    "diagonal": {"dim": 2, "vectors": [[1, 0], [0, 2]]},
    "collapse": {"dim": 2, "vectors": [[1, 0], [1, 1]]},
    "nonspan": {"dim": 2, "vectors": [[1, 0], [2, 0]]},
    "basis": {"dim": 2, "vectors": [[1, 0], [0, 1]]},
    "basis_tilted": {"dim": 2, "vectors": [[1, 0.1], [0, 1]]},
    "witness": {"dim": 2, "vectors": [[0.5, 0.5], [0.5, 0.5]]},
    "doubled": {"dim": 2, "vectors": [[1, 0], [0, 1], [1, 0], [0, 1]]},
}

NUM = {"type": "number"}
NUM_OR_NULL = {"type": ["number", "null"]}
FRAME = {
    "type": "object",
    "required": ["dim", "vectors"],
    "additionalProperties": False,
    "properties": {
        "dim": {"type": "integer", "minimum": 1},
        "vectors": {"type": "array", "minItems": 1, "items": {"type": "array", "items": NUM}},
    },
}
FRAME_REPORT = {
    "type": "object",
    "required": ["lower_bound", "upper_bound", "condition_number", "is_tight", "eigenvalues"],
    "properties": {
        "lower_bound": NUM,
        "upper_bound": NUM,
        "condition_number": NUM,
        "is_tight": {"type": "boolean"},
        "eigenvalues": {"type": "array", "items": NUM},
    },
}


def obj(**props):
    return {"type": "object", "required": list(props), "properties": props}


RESULT_SCHEMAS = {
    "analyze": obj(
        lower_bound=NUM, upper_bound=NUM, condition_number=NUM, is_tight={"type": "boolean"},
        eigenvalues={"type": "array", "items": NUM}, mean_squared_norm=NUM,
    ),
    "dual": obj(dual=FRAME),
    "improve": obj(r=NUM, epsilon=NUM, safety=NUM, before=FRAME_REPORT, after=FRAME_REPORT,
                   deltas={"type": "array"}, perturbed=FRAME),
    "tighten": obj(steps={"type": "integer"}, r={"type": "array", "items": NUM},
                   final_bound=NUM, final_condition_number=NUM, final=FRAME),
    "stability": obj(radius=NUM, lower_bound=NUM, k={"type": "integer"}),
    "pw-check": obj(**{"lambda": NUM}, mu_crude=NUM, mu_sharp=NUM, admissible={"type": "boolean"},
                    guaranteed_lower=NUM_OR_NULL, guaranteed_upper=NUM, base=FRAME_REPORT,
                    perturbed_is_frame={"type": "boolean"},
                    perturbed={"anyOf": [FRAME_REPORT, {"type": "null"}]}),
    "append": obj(combined_tight={"type": "boolean"}, appended_tight={"type": "boolean"},
                  appended_bound=NUM_OR_NULL, combined_bound=NUM_OR_NULL,
                  degenerate={"type": "boolean"}, combined_report=FRAME_REPORT),
    "erase": obj(indices={"type": "array", "items": {"type": "integer"}},
                 erased_count={"type": "integer"}, remainder_is_frame={"type": "boolean"},
                 remainder_tight={"type": "boolean"},
                 remainder_report={"anyOf": [FRAME_REPORT, {"type": "null"}]},
                 erased_tight={"type": "boolean"}, erased_bound=NUM_OR_NULL,
                 degenerate={"type": "boolean"}, rule_applied={"type": "string"}),
    "diag2": obj(chosen_vector={"type": "integer"}, chosen_entry_row={"type": "integer"},
                 perturb_axis={"type": "integer"}, epsilon=NUM, still_frame={"type": "boolean"},
                 perturbed=FRAME),
    "blend": obj(frame=FRAME, tau=NUM, threshold=NUM_OR_NULL, mu=NUM, certified={"type": "boolean"},
                 guaranteed_lower=NUM_OR_NULL, guaranteed_upper=NUM,
                 report={"anyOf": [FRAME_REPORT, {"type": "null"}]}),
    "random": obj(seed={"type": "integer"}, frame=FRAME),
}


def report_schema(command):
    return {
        "type": "object",
        "required": ["command", "status", "input", "result", "messages"],
        "additionalProperties": False,
        "properties": {
            "command": {"const": command},
            "status": {"enum": ["ok", "warning", "error"]},
            "input": {"anyOf": [obj(n={"type": "integer"}, k={"type": "integer"}), {"type": "null"}]},
            "result": {"anyOf": [RESULT_SCHEMAS[command], {"type": "null"}]},
            "messages": {"type": "array", "items": {"type": "string"}},
        },
    }


@pytest.fixture
def workdir(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    for name, doc in WORKED.items():
        Path(f"{name}.json").write_text(json.dumps(doc))
    return tmp_path


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr().out
    return code, out, json.loads(out)


def check_golden(name, text):
    path = GOLDEN / name
    if UPDATE:
        path.write_text(text)
    assert text == path.read_text()


@pytest.mark.parametrize(
    "golden, argv",
    [
        ("analyze_f2.json", ["analyze", "f2.json"]),
        ("tighten_f2.json", ["tighten", "f2.json"]),
        ("tighten_f3.json", ["tighten", "f3.json"]),
        ("diag2_three.json", ["diag2", "three.json"]),
        ("diag2_diagonal.json", ["diag2", "diagonal.json"]),
        ("diag2_collapse.json", ["diag2", "collapse.json"]),
    ],
)
def test_golden_reports(workdir, capsys, golden, argv):
    code, out, _ = run(capsys, *argv)
    assert code == 0
    check_golden(golden, out)
    # byte-stable across repeated runs
    assert run(capsys, *argv)[1] == out


def test_analyze_values(workdir, capsys):
    code, _, rep = run(capsys, "analyze", "f2.json")
    assert code == 0 and rep["status"] == "ok"
    assert rep["input"] == {"n": 2, "k": 2}
    r = rep["result"]
    assert (r["lower_bound"], r["upper_bound"], r["condition_number"]) == (1.0, 4.0, 4.0)


def test_tighten_writes_frame_and_trace(workdir, capsys):
    code, _, rep = run(capsys, "tighten", "f2.json", "-o", "out.json", "--trace", "t.json")
    assert code == 0
    F = parse_frame_file("out.json")
    np.testing.assert_allclose(F.vectors, [[3, 0], [0, 3]], atol=1e-12)
    trace = json.loads(Path("t.json").read_text())
    assert len(trace["steps"]) == 1 and trace["steps"][0]["r"] == 2.0
    assert trace["final"] == {"dim": 2, "vectors": F.vectors.tolist()}
    check_golden("trace_f2.json", Path("t.json").read_text())


def test_non_frame_exits_1(workdir, capsys):
    code, _, rep = run(capsys, "analyze", "nonspan.json")
    assert code == 1
    assert rep["status"] == "error" and rep["result"] is None
    assert rep["messages"][0].startswith("NotAFrame")


def test_ragged_csv_exits_2(workdir, capsys):
    Path("bad.csv").write_text("1,0\n0\n")
    code, _, rep = run(capsys, "analyze", "bad.csv")
    assert code == 2 and rep["status"] == "error"
    assert "row 2" in rep["messages"][0]


def test_usage_error_exits_2(capsys):
    with pytest.raises(SystemExit) as exc:
        cli.main(["improve"])
    assert exc.value.code == 2


def test_every_subcommand_matches_schema(workdir, capsys):
    Path("added.json").write_text(json.dumps({"dim": 2, "vectors": [[1, 0], [0, 1]]}))
    calls = [
        ["analyze", "f2.json"],
        ["dual", "three.json", "-o", "dual.json"],
        ["improve", "f2.json", "--epsilon", "1", "--safety", "0.5"],
        ["tighten", "f3.json"],
        ["stability", "basis.json"],
        ["pw-check", "basis.json", "basis_tilted.json"],
        ["pw-check", "basis.json", "witness.json"],
        ["append", "basis.json", "added.json"],
        ["erase", "doubled.json", "--indices", "1,2"],
        ["diag2", "collapse.json"],
        ["blend", "basis.json", "basis_tilted.json", "--t", "5,0"],
        ["blend", "basis.json", "basis_tilted.json", "--t", "50,0"],
        ["random", "--dim", "3", "--count", "4", "--seed", "7"],
    ]
    for argv in calls:
        code, _, rep = run(capsys, *argv)
        assert code == 0, argv
        jsonschema.validate(rep, report_schema(argv[0]))


def test_warning_statuses(workdir, capsys):
    code, _, rep = run(capsys, "blend", "basis.json", "basis_tilted.json", "--t", "50,0")
    assert code == 0 and rep["status"] == "warning"
    assert rep["result"]["certified"] is False
    code, _, rep = run(capsys, "diag2", "collapse.json")
    assert code == 0 and rep["status"] == "warning"
    code, _, rep = run(capsys, "pw-check", "basis.json", "witness.json")
    assert code == 0 and rep["status"] == "warning"
    assert rep["result"]["admissible"] is False


def test_improve_report(workdir, capsys):
    _, _, rep = run(capsys, "improve", "f2.json", "--epsilon", "1", "--safety", "0.5", "-o", "i.json")
    assert rep["result"]["r"] == 0.5
    assert rep["result"]["after"]["condition_number"] == pytest.approx(2.25)
    assert parse_frame_file("i.json").vectors.tolist() == [[1.5, 0.0], [0.0, 2.25]]


def test_erase_uses_one_based_indices(workdir, capsys):
    _, _, rep = run(capsys, "erase", "doubled.json", "--indices", "1,2")
    assert rep["result"]["remainder_tight"] is True
    code, _, rep = run(capsys, "erase", "doubled.json", "--indices", "0")
    assert code == 2
    code, _, rep = run(capsys, "erase", "doubled.json", "--indices", "9")
    assert code == 2


def test_erase_non_tight_base_exits_1(workdir, capsys):
    code, _, rep = run(capsys, "erase", "f2.json", "--indices", "1")
    assert code == 1 and rep["messages"][0].startswith("NotTight")


def test_random_is_seeded(workdir, capsys):
    a = run(capsys, "random", "--dim", "2", "--count", "3", "--seed", "1")[1]
    b = run(capsys, "random", "--dim", "2", "--count", "3", "--seed", "1")[1]
    c = run(capsys, "random", "--dim", "2", "--count", "3", "--seed", "2")[1]
    assert a == b != c


ERROR_CLASSES = [
    c for c in vars(errors).values()
    if isinstance(c, type) and issubclass(c, errors.FrameError)
]
EXPECTED_CODE = {
    errors.NotAFrame: 1, errors.NoConvergence: 1, errors.SingularOperator: 1, errors.NotTight: 1,
    errors.AllZero: 1, errors.FrameError: 1,
    errors.NonSymmetric: 2, errors.DomainError: 2, errors.DimensionMismatch: 2,
    errors.InvalidIndices: 2, errors.WrongDimension: 2, errors.FormatError: 2, errors.EmptyInput: 2,
}


def test_error_table_is_complete():
    assert set(ERROR_CLASSES) == set(EXPECTED_CODE)


@settings(max_examples=50, deadline=None)
@given(st.sampled_from(ERROR_CLASSES), st.text(max_size=20))
def test_exit_code_mapping(exc_class, message):
    def boom(ctx):
        raise exc_class(message)

    out = io.StringIO()
    with mock.patch.object(cli, "cmd_stability", boom), contextlib.redirect_stdout(out), \
            contextlib.redirect_stderr(io.StringIO()):
        code = cli.main(["stability", "unused.json"])
    assert code == EXPECTED_CODE[exc_class]
    assert json.loads(out.getvalue())["status"] == "error"


# --- frame file parsing -------------------------------------------------


def test_parse_json_and_csv_agree():
    a = parse_json_frame('{"dim":2,"vectors":[[1,0],[0,2]]}')
    b = parse_csv_frame("1,0\n0,2")
    assert a == b and a.dim == 2 and len(a) == 2


@pytest.mark.parametrize(
    "text, exc, fragment",
    [
        ("", errors.EmptyInput, "empty"),
        ('{"dim": 2, "vectors": []}', errors.EmptyInput, "vectors"),
        ('{"dim": 2, "vectors": [[1, 0]], "x": 1}', errors.FormatError, "unknown key"),
        ('{"vectors": [[1, 0]]}', errors.FormatError, "dim"),
        ('{"dim": 0, "vectors": [[1]]}', errors.FormatError, "dim"),
        ('{"dim": true, "vectors": [[1]]}', errors.FormatError, "dim"),
        ('{"dim": 2, "vectors": [[1, 0], [1]]}', errors.DimensionMismatch, "vectors[1]"),
        ('{"dim": 2, "vectors": [[1, "a"]]}', errors.FormatError, "vectors[0][1]"),
        ('{"dim": 1, "vectors": [[NaN]]}', errors.FormatError, "NaN"),
        ('{"dim": 2,\n "vectors": [[1, 0],]}', errors.FormatError, "line 2"),
        ("[1, 2]", errors.FormatError, "object"),
    ],
)
def test_json_errors(text, exc, fragment):
    with pytest.raises(exc, match=None) as info:
        parse_json_frame(text)
    assert fragment in str(info.value)


@pytest.mark.parametrize(
    "text, exc, fragment",
    [
        ("", errors.EmptyInput, "no vectors"),
        ("\n\n", errors.EmptyInput, "no vectors"),
        ("1,0\n0", errors.DimensionMismatch, "row 2"),
        ("1,0\n0,x", errors.FormatError, "line 2, field 2"),
        ("1,inf", errors.FormatError, "line 1"),
    ],
)
def test_csv_errors(text, exc, fragment):
    with pytest.raises(exc) as info:
        parse_csv_frame(text)
    assert fragment in str(info.value)


def test_format_selection(tmp_path):
    p = tmp_path / "frame.csv"
    p.write_text("1,0\n0,2\n")
    assert len(parse_frame_file(p)) == 2
    q = tmp_path / "frame.txt"
    q.write_text("1,0\n0,2\n")
    assert len(parse_frame_file(q, "csv")) == 2
    with pytest.raises(errors.FormatError):
        parse_frame_file(q)
    with pytest.raises(errors.FormatError):
        parse_frame_file(tmp_path / "missing.json")


finite = st.floats(allow_nan=False, allow_infinity=False, width=64)


@settings(max_examples=200, deadline=None)
@given(
    st.integers(1, 4).flatmap(
        lambda n: st.lists(st.lists(finite, min_size=n, max_size=n), min_size=1, max_size=6)
    ),
    st.sampled_from(["json", "csv"]),
)
def test_round_trip_bit_identical(rows, fmt):
    F = Frame(rows)
    buf = io.StringIO()
    write_frame(F, buf, fmt)
    G = parse_frame_file(io.StringIO(buf.getvalue()), fmt)
    assert G.vectors.shape == F.vectors.shape
    assert G.vectors.tobytes() == F.vectors.tobytes()


def test_json_writer_layout():
    assert frame_to_json(Frame([[1, 0], [0, 2.5]])) == (
        '{\n  "dim": 2,\n  "vectors": [\n    [1.0, 0.0],\n    [0.0, 2.5]\n  ]\n}\n'
    )
