import pytest

from rtlforge.netlist import LibertyParseError, parse_liberty

ONE_CELL = """
library (tiny) {
  nom_voltage : 1.2;
  cell (INV) {
    area : 1.0;
    cell_leakage_power : 0.5;
    pin (A) { direction : input; capacitance : 0.01; }
    pin (Y) {
      direction : output;
      timing () { related_pin : "A"; intrinsic_rise : 0.05; intrinsic_fall : 0.04; }
    }
  }
}
"""


def test_single_cell_library():
    lib = parse_liberty(ONE_CELL)
    assert lib.name == "tiny"
    assert lib.default_voltage == 1.2
    assert set(lib.cells) == {"INV"}
    arc, = lib.cells["INV"].arcs
    assert arc.delay == 0.05  # max of rise/fall intrinsics


def test_demo_library_cell_count_and_area(liberty):
    assert len(liberty.cells) == 12
    # hand sum of the area attributes in sample_data/lib/demo12.lib
    hand_sum = 1.0 + 1.5 + 1.8 + 1.8 + 1.4 + 1.4 + 2.4 + 2.4 + 2.6 + 2.0 + 6.0 + 7.2
    assert sum(c.area for c in liberty.cells.values()) == pytest.approx(hand_sum)


def test_missing_closing_brace_reports_eof():
    text = ONE_CELL.strip()[:-1]  # drop the final brace
    with pytest.raises(LibertyParseError) as err:
        parse_liberty(text)
    assert "closing brace" in str(err.value)
    assert err.value.line >= text.count("\n")


def test_unknown_attributes_warn_not_fail():
    lib = parse_liberty(ONE_CELL.replace(
        "cell_leakage_power : 0.5;",
        "cell_leakage_power : 0.5; cell_footprint : inv;"))
    assert any("cell_footprint" in w for w in lib.warnings)


def test_table_delay_is_max_of_values():
    text = ONE_CELL.replace(
        'timing () { related_pin : "A"; intrinsic_rise : 0.05; intrinsic_fall : 0.04; }',
        'timing () { related_pin : "A"; '
        'cell_rise (t) { values ("0.02, 0.08", "0.04, 0.061"); } }')
    lib = parse_liberty(text)
    assert lib.cells["INV"].arcs[0].delay == 0.08


def test_arc_without_delay_defaults_with_warning():
    text = ONE_CELL.replace(
        'timing () { related_pin : "A"; intrinsic_rise : 0.05; intrinsic_fall : 0.04; }',
        'timing () { related_pin : "A"; }')
    lib = parse_liberty(text)
    assert lib.cells["INV"].arcs[0].delay == 1.0
    assert any("no delay data" in w for w in lib.warnings)


def test_sequential_detection(liberty):
    assert liberty.cells["DFF"].is_sequential
    assert liberty.cells["DFF"].clock_pin == "CLK"
    assert liberty.cells["DFF"].data_pins == ("D",)
    assert liberty.cells["DFFE"].data_pins == ("D", "EN")
    assert not liberty.cells["INV"].is_sequential


def test_comb_cell_without_arcs_rejected():
    text = ONE_CELL.replace(
        'timing () { related_pin : "A"; intrinsic_rise : 0.05; intrinsic_fall : 0.04; }',
        "")
    with pytest.raises(LibertyParseError):
        parse_liberty(text)


def test_empty_text_rejected():
    with pytest.raises(LibertyParseError):
        parse_liberty("   ")
