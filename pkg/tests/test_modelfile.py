import numpy as np
import pytest

from probecap import ModelFileError, format_model, load_model, parse_model
from probecap.thm1 import thm1_problem

GOOD = """\
# binary erasure-style toy
[alphabets]
S = 0 1
Se = * 0 1
X = 0 1
Y = 0 1
Ae = 0 1

[state]
0.5 0.5

[channel]
1 0 0 1
0 1 1 0

[probe]
1 0 0
0 1 0
1 0 0
0 0 1
[cost]
0
1
[budget]
0.5
"""


def test_parse_good():
    m = parse_model(GOOD)
    assert m.Sd.symbols == ("-",) and m.budget == 0.5
    np.testing.assert_allclose(m.channel_table[1, 1], [1, 0])


@pytest.mark.parametrize("builder", ["ex1", "ex2", "ex3", "two"])
def test_round_trip(builder, ex1, ex2, ex3, ex1_two_sided):
    m = {"ex1": ex1, "ex2": ex2, "ex3": ex3, "two": ex1_two_sided}[builder]
    back = parse_model(format_model(m), name=m.name)
    np.testing.assert_array_equal(back.channel_table, m.channel_table)
    np.testing.assert_array_equal(back.probe_table, m.probe_table)
    np.testing.assert_array_equal(back.cost.table, m.cost.table)
    assert format_model(back) == format_model(m)


def test_load_model(tmp_path):
    p = tmp_path / "toy.pcm"
    p.write_text(GOOD)
    assert load_model(p).name == "toy"


@pytest.mark.parametrize("old,new,line,col", [
    ("0.5 0.5\n", "0.5 0.6\n", 10, 1),             # state row does not sum to 1
    ("0 1 1 0\n", "0 1 x 0\n", 14, 5),             # not a number
    ("0 1 1 0\n", "0 1 0.5 0\n", 13, 5),           # channel column sum
    ("[cost]", "[costs]", 21, 1),                 # unknown section
    ("0 0 1\n[cost]", "0 0 1 0\n[cost]", 20, 7),   # wrong entry count
])
def test_errors_carry_position(old, new, line, col):
    with pytest.raises(ModelFileError) as info:
        parse_model(GOOD.replace(old, new, 1))
    assert (info.value.line, info.value.column) == (line, col)


def test_missing_section():
    with pytest.raises(ModelFileError, match="missing section"):
        parse_model(GOOD.split("[budget]")[0])


def test_negative_rejected():
    with pytest.raises(ModelFileError):
        parse_model(GOOD.replace("[budget]\n0.5", "[budget]\n-0.5"))


def test_input_constraint_section():
    m = parse_model(GOOD + "[input_constraint]\ncost = 0 1\nbound = 0.25\n")
    assert m.input_constraint.bound == 0.25
    with pytest.raises(ModelFileError):
        parse_model(GOOD + "[input_constraint]\ncost = 0 1\n")


def test_file_model_solvable():
    thm1_problem(parse_model(GOOD.replace("Y = 0 1\n", "Y = 0 1\nSd = 0 1\n")
                             .replace("1 0 0\n0 1 0\n1 0 0\n0 0 1\n",
                                      "1 0 0 0 0 0\n0 0 1 0 0 0\n0 1 0 0 0 0\n0 0 0 0 0 1\n")))
