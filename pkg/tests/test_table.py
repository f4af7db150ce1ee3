import dataclasses

import pytest

from tabletalk.table import (
    BadHeaderName,
    ColumnarTable,
    DuplicateHeader,
    Dtype,
    EmptyInput,
    RaggedRow,
    SizeCategory,
    content_id,
    format_number,
    infer_dtype,
    load_csv,
    parse_number,
    size_category,
)


def table_from(text: str, lenient: bool = False) -> ColumnarTable:
    return load_csv(text.encode("utf-8"), name="t", lenient=lenient)


class TestParseNumber:
    @pytest.mark.parametrize(
        "text,expected",
        [
            ("25.3", 25.3),
            ("-4", -4.0),
            ("+7.5", 7.5),
            (".5", 0.5),
            ("5.", 5.0),
            ("  35  ", 35.0),
            ("0", 0.0),
        ],
    )
    def test_accepts_plain_decimals(self, text, expected):
        assert parse_number(text) == expected

    @pytest.mark.parametrize(
        "text", ["", " ", "abc", "1e5", "2E3", "1_000", "1,234", "nan", "inf", "-inf", "0x10", "4-2"]
    )
    def test_rejects_everything_else(self, text):
        assert parse_number(text) is None


class TestInferDtype:
    def test_all_numeric_cells_make_numeric(self):
        assert infer_dtype(["1", "2.5", "", "-3"]) is Dtype.NUMERIC

    def test_single_text_cell_makes_categorical(self):
        assert infer_dtype(["1", "2.5", "x"]) is Dtype.CATEGORICAL

    def test_no_values_at_all_is_categorical(self):
        assert infer_dtype(["", "", ""]) is Dtype.CATEGORICAL


class TestLoadCsv:
    def test_basic_shape_and_dtypes(self, cities_table):
        assert cities_table.row_count == 9
        assert [c.name for c in cities_table.columns] == ["City", "Temp", "Humidity", "Wind", "Clouds"]
        assert [c.dtype for c in cities_table.columns] == [
            Dtype.CATEGORICAL,
            Dtype.NUMERIC,
            Dtype.NUMERIC,
            Dtype.NUMERIC,
            Dtype.CATEGORICAL,
        ]

    def test_empty_fields_become_missing(self, cities_table):
        assert {c.name: c.missing_count for c in cities_table.columns} == {
            "City": 0,
            "Temp": 1,
            "Humidity": 1,
            "Wind": 1,
            "Clouds": 1,
        }

    def test_numeric_cells_are_floats(self, cities_table):
        temp = cities_table.column("Temp")
        assert temp.cells[0] == 25.3
        assert temp.cells[3] is None
        assert temp.cells[8] == 35.0  # written as bare "35"

    def test_header_whitespace_is_stripped(self):
        t = table_from(" a , b \n1,2\n")
        assert [c.name for c in t.columns] == ["a", "b"]

    def test_no_header_raises(self):
        with pytest.raises(EmptyInput):
            table_from("")

    def test_blank_header_name_raises(self):
        with pytest.raises(BadHeaderName):
            table_from("a,,c\n1,2,3\n")

    def test_duplicate_header_raises(self):
        with pytest.raises(DuplicateHeader) as err:
            table_from("a,b,a\n1,2,3\n")
        assert "a" in str(err.value)

    def test_ragged_row_reports_its_index(self):
        with pytest.raises(RaggedRow) as err:
            table_from("a,b\n1,2\n3\n")
        assert err.value.row_index == 2

    def test_header_only_gives_zero_rows(self):
        t = table_from("a,b\n")
        assert t.row_count == 0
        assert [c.dtype for c in t.columns] == [Dtype.CATEGORICAL, Dtype.CATEGORICAL]

    def test_quoted_field_with_comma_stays_text(self):
        t = table_from('a\n"1,234"\n')
        assert t.column("a").dtype is Dtype.CATEGORICAL
        assert t.column("a").cells == ("1,234",)


class TestLenientLoading:
    csv = "score\n1\n2\n3\nbad\n"

    def test_strict_keeps_mixed_column_categorical(self):
        t = table_from(self.csv)
        assert t.column("score").dtype is Dtype.CATEGORICAL

    def test_lenient_coerces_majority_numeric_column(self):
        t = table_from(self.csv, lenient=True)
        col = t.column("score")
        assert col.dtype is Dtype.NUMERIC
        assert col.cells == (1.0, 2.0, 3.0, None)

    def test_lenient_leaves_half_numeric_column_alone(self):
        t = table_from("score\n1\n2\nx\ny\n", lenient=True)
        assert t.column("score").dtype is Dtype.CATEGORICAL


class TestTableValue:
    def test_rows_round_trip(self, cities_table):
        first = cities_table.row(0)
        assert first == ["New York", 25.3, 60.0, 10.9, "PartShade"]
        assert list(cities_table.iter_rows())[0] == first

    def test_take_rows_preserves_schema_and_order(self, cities_table):
        sliced = cities_table.take_rows([2, 0])
        assert sliced.row_count == 2
        assert sliced.row(0)[0] == "Beijing"
        assert sliced.row(1)[0] == "New York"
        assert [c.dtype for c in sliced.columns] == [c.dtype for c in cities_table.columns]

    def test_columns_are_frozen(self, cities_table):
        with pytest.raises(dataclasses.FrozenInstanceError):
            cities_table.columns[0].name = "x"

    def test_schema_maps_names_to_dtypes(self, cities_table):
        schema = cities_table.schema()
        assert schema["City"] is Dtype.CATEGORICAL
        assert schema["Temp"] is Dtype.NUMERIC


class TestSizeCategory:
    @pytest.mark.parametrize(
        "rows,expected",
        [
            (0, SizeCategory.SMALL),
            (99, SizeCategory.SMALL),
            (100, SizeCategory.MEDIUM),
            (200, SizeCategory.MEDIUM),
            (201, SizeCategory.LARGE),
        ],
    )
    def test_boundaries(self, rows, expected):
        body = "".join(f"{i}\n" for i in range(rows))
        t = table_from("n\n" + body)
        assert size_category(t) is expected


def test_content_id_is_stable_and_content_sensitive():
    a = content_id(b"a,b\n1,2\n")
    assert a == content_id(b"a,b\n1,2\n")
    assert a != content_id(b"a,b\n1,3\n")
    assert len(a) == 12


@pytest.mark.parametrize(
    "value,expected",
    [(3.0, "3"), (3.5, "3.5"), (-2.0, "-2"), (0.0, "0"), (30.762500000000003, "30.762500000000003")],
)
def test_format_number_collapses_whole_floats(value, expected):
    assert format_number(value) == expected
