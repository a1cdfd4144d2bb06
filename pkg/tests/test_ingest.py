import random

import numpy as np
import pytest

from opinionnet import (
    ResponseMatrix,
    SurveyItem,
    SurveySchema,
    ValidationError,
    load_survey,
    write_survey,
)

from helpers import make_matrix, make_schema


def write(path, text):
    path.write_text(text, encoding="utf-8")
    return path


def test_drop_participant_drops_incomplete_rows(tmp_path):
    schema = make_schema([4, 4, 4])
    f = write(tmp_path / "s.csv", "pid,q00,q01,q02\na,1,2,3\nb,1,NA,3\nc,0,0,0\n")
    mx = load_survey(f, schema, missing_policy="drop_participant")
    assert mx.n_participants == 2
    assert mx.participant_ids == ("a", "c")
    assert mx.report.rows_read == 3
    assert mx.report.rows_dropped == 1
    assert not mx.has_missing


def test_keep_pairwise_retains_masked_missing(tmp_path):
    schema = make_schema([4, 4, 4])
    f = write(tmp_path / "s.csv", "pid,q00,q01,q02\na,1,2,3\nb,1,NA,3\n")
    mx = load_survey(f, schema, missing_policy="keep_pairwise")
    assert mx.n_participants == 2
    assert mx.has_missing
    assert mx.code_at(1, 1) is None
    assert mx.code_at(1, 0) == 1
    assert mx.report.rows_dropped == 0
    assert mx.report.missing_cells == 1


def test_out_of_range_code_names_row_column_value(tmp_path):
    # k=4 admits 0..3; a 4 is one past the max
    schema = make_schema([4, 4])
    f = write(tmp_path / "s.csv", "pid,q00,q01\na,1,2\nb,1,4\n")
    with pytest.raises(ValidationError, match=r"row 2.*'q01'.*got 4"):
        load_survey(f, schema)


def test_negative_code_rejected(tmp_path):
    schema = make_schema([4])
    f = write(tmp_path / "s.csv", "pid,q00\na,-2\n")
    with pytest.raises(ValidationError, match="out-of-range"):
        load_survey(f, schema)


def test_non_integer_code_rejected(tmp_path):
    schema = make_schema([4])
    f = write(tmp_path / "s.csv", "pid,q00\na,high\n")
    with pytest.raises(ValidationError, match="neither an integer nor the missing token"):
        load_survey(f, schema)


def test_duplicate_participant_id(tmp_path):
    schema = make_schema([4])
    f = write(tmp_path / "s.csv", "pid,q00\na,1\na,2\n")
    with pytest.raises(ValidationError, match="duplicate participant id 'a'"):
        load_survey(f, schema)


def test_unknown_column_in_schema(tmp_path):
    schema = make_schema([4, 4])
    f = write(tmp_path / "s.csv", "pid,q00\na,1\n")
    with pytest.raises(ValidationError, match="'q01'.*missing from the header"):
        load_survey(f, schema)


def test_ragged_row_is_malformed(tmp_path):
    schema = make_schema([4, 4])
    f = write(tmp_path / "s.csv", "pid,q00,q01\na,1\n")
    with pytest.raises(ValidationError, match="malformed CSV"):
        load_survey(f, schema)


def test_header_only_file_is_an_error(tmp_path):
    schema = make_schema([4])
    f = write(tmp_path / "s.csv", "pid,q00\n")
    with pytest.raises(ValidationError, match="no data rows"):
        load_survey(f, schema)


def test_missing_file(tmp_path):
    schema = make_schema([4])
    with pytest.raises(ValidationError, match="not found"):
        load_survey(tmp_path / "absent.csv", schema)


def test_all_rows_dropped_is_an_error(tmp_path):
    schema = make_schema([4])
    f = write(tmp_path / "s.csv", "pid,q00\na,NA\n")
    with pytest.raises(ValidationError, match="dropped"):
        load_survey(f, schema)


def test_missing_token_compared_after_trimming(tmp_path):
    schema = make_schema([4, 4])
    f = write(tmp_path / "s.csv", "pid,q00,q01\na, NA ,2\n")
    mx = load_survey(f, schema, missing_policy="keep_pairwise")
    assert mx.code_at(0, 0) is None
    # codes may be padded too
    f2 = write(tmp_path / "s2.csv", "pid,q00,q01\na, 1 ,2\n")
    mx2 = load_survey(f2, schema)
    assert mx2.code_at(0, 0) == 1


def test_quoted_fields_and_attribute_passthrough(tmp_path):
    schema = make_schema([4], attrs=("party",))
    f = write(tmp_path / "s.csv", 'pid,party,q00\n"p, 1","Independent ""I""",3\n')
    mx = load_survey(f, schema)
    assert mx.participant_ids == ("p, 1",)
    assert mx.attributes["party"] == ('Independent "I"',)


def test_wellcome_style_schema_on_synthetic_rows(tmp_path):
    # 13 items: ten 4-point scales plus three 5-point vaccine questions
    ks = [4] * 10 + [5] * 3
    schema = make_schema(ks)
    rng = random.Random(7)
    lines = ["pid," + ",".join(schema.item_ids)]
    for p in range(1000):
        lines.append(f"w{p:04d}," + ",".join(str(rng.randrange(k)) for k in ks))
    f = write(tmp_path / "wellcome.csv", "\n".join(lines) + "\n")
    mx = load_survey(f, schema)
    assert mx.n_items == 13
    assert mx.n_participants == 1000


def test_round_trip_preserves_matrix(tmp_path):
    schema = make_schema([4, 5, 2], attrs=("party", "region"))
    rows = [[0, 4, 1], [3, None, 0], [1, 2, None]]
    mx = make_matrix(
        rows, [4, 5, 2],
        ids=["x, 1", 'y "q"', "z"],
        attributes={"party": ["D", "R", ""], "region": ["north", "south, east", "west"]},
        schema=schema,
    )
    out = tmp_path / "round.csv"
    write_survey(mx, out)
    back = load_survey(out, schema, missing_policy="keep_pairwise")
    assert back.equals(mx)


def test_load_is_deterministic(tmp_path):
    schema = make_schema([4, 4])
    f = write(tmp_path / "s.csv", "pid,q00,q01\na,1,2\nb,0,3\n")
    a = load_survey(f, schema)
    b = load_survey(f, schema)
    assert a.equals(b)


def test_row_order_follows_file_order(tmp_path):
    schema = make_schema([2])
    f = write(tmp_path / "s.csv", "pid,q00\nz,0\na,1\nm,0\n")
    mx = load_survey(f, schema)
    assert mx.participant_ids == ("z", "a", "m")


def test_schema_rejects_duplicate_items():
    with pytest.raises(ValidationError, match="duplicate item id"):
        SurveySchema(items=(SurveyItem("q", 4), SurveyItem("q", 5)), id_column="pid")


def test_schema_rejects_tiny_scale():
    with pytest.raises(ValidationError, match="at least 2 points"):
        SurveySchema(items=(SurveyItem("q", 1),), id_column="pid")


def test_schema_rejects_overlapping_columns():
    with pytest.raises(ValidationError, match="disjoint"):
        SurveySchema(items=(SurveyItem("q", 4),), id_column="q")
    with pytest.raises(ValidationError, match="disjoint"):
        SurveySchema(items=(SurveyItem("q", 4),), id_column="pid", attribute_columns=("q",))


def test_schema_rejects_no_items():
    with pytest.raises(ValidationError, match="at least one item"):
        SurveySchema(items=(), id_column="pid")


def test_schema_json_round_trip(tmp_path):
    schema = make_schema([4, 5], attrs=("party",), missing_token="-9")
    path = tmp_path / "schema.json"
    schema.to_json(path)
    assert SurveySchema.from_json(path).to_dict() == schema.to_dict()


def test_matrix_constructor_validates():
    schema = make_schema([4])
    with pytest.raises(ValidationError, match="unique"):
        ResponseMatrix(schema, ["a", "a"], np.array([[1], [2]], dtype=np.int16))
    with pytest.raises(ValidationError, match="out-of-range"):
        ResponseMatrix(schema, ["a"], np.array([[9]], dtype=np.int16))


def test_duplicate_header_column_rejected(tmp_path):
    schema = make_schema([4])
    f = write(tmp_path / "s.csv", "pid,q00,q00\na,1,2\n")
    with pytest.raises(ValidationError, match="more than once"):
        load_survey(f, schema)


def test_crlf_line_endings(tmp_path):
    schema = make_schema([4, 4])
    f = tmp_path / "s.csv"
    f.write_bytes(b"pid,q00,q01\r\na,1,2\r\nb,0,3\r\n")
    mx = load_survey(f, schema)
    assert mx.participant_ids == ("a", "b")
    assert mx.code_at(1, 1) == 3


def test_unicode_ids_and_attributes_round_trip(tmp_path):
    schema = make_schema([4], attrs=("city",))
    mx = make_matrix([[1], [2]], [4], ids=["rené", "张三"],
                     attributes={"city": ["São Paulo", "München"]}, schema=schema)
    out = tmp_path / "u.csv"
    write_survey(mx, out)
    back = load_survey(out, schema)
    assert back.equals(mx)
