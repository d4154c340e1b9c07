import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from homsim import dsl
from homsim.dsl import (
    BS,
    Amplitude,
    Circuit,
    Literal,
    Param,
    ParseError,
    Phase,
    SuperposedBS,
    ValidationError,
    builtin,
    parse,
    parse_angle,
    render,
    validate,
)
from homsim.numerics import BasisSign
from homsim.phase_basis import all_cases

HOM_SRC = "circuit hom\nin a 1\nin b exp(i*theta)\nbs +\ndetect c d"
MZI_SRC = "circuit mzi\nin a 1\nbs +\nphase d zeta\nbs +\ndetect e f"


def test_parse_hom():
    c = parse(HOM_SRC)
    assert c == Circuit(
        "hom",
        (("a", Amplitude(1.0)), ("b", Amplitude(1.0, Param("theta")))),
        (BS(BasisSign.PLUS),),
        ("c", "d"),
    )


def test_parse_mzi():
    c = parse(MZI_SRC)
    assert c.elements == (BS(BasisSign.PLUS), Phase("d", Param("zeta")), BS(BasisSign.PLUS))
    assert c.detectors == ("e", "f")
    assert c.parameters() == {"zeta"}


def test_comments_and_whitespace():
    src = "# header comment\ncircuit  x   # trailing\n\n  in a   2 * exp( i * pi / 2 )\nbs -\n detect d c\n"
    c = parse(src)
    assert c.inputs == (("a", Amplitude(2.0, Literal(math.pi / 2))),)
    assert c.detectors == ("d", "c")


def test_superposed_element():
    c = parse("circuit s\nin a 1\nbs superposed opposite antisymmetric -\ndetect c d")
    [el] = c.elements
    assert isinstance(el, SuperposedBS) and el.case.label == "opposite/antisymmetric/-"


@pytest.mark.parametrize("text,value", [
    ("pi", math.pi), ("pi/2", math.pi / 2), ("-pi/2", -math.pi / 2), ("2pi", 2 * math.pi),
    ("3*pi/4", 3 * math.pi / 4), ("0.25", 0.25), ("-1e-3", -1e-3),
])
def test_parse_angle(text, value):
    assert parse_angle(text) == value


@pytest.mark.parametrize("text", ["", "pie", "1.2.3", "nan", "inf", "pi/"])
def test_parse_angle_rejects(text):
    with pytest.raises(ValueError):
        parse_angle(text)


@pytest.mark.parametrize("src,line,col,msg", [
    ("bs %", 1, 4, "unknown sign"),
    ("circuit x\nin a 1\nfoo b\nbs +\ndetect c d", 3, 1, "unknown keyword"),
    ("circuit x\nin a 1.2.3\nbs +\ndetect c d", 2, 6, "malformed number"),
    ("circuit x\nin a 1\nbs +\ndetect c c", 4, 10, "duplicate detector"),
    ("circuit x\nin q 1\nbs +\ndetect c d", 2, 4, "undeclared port"),
    ("circuit x\nin a 1\nbs +\ndetect c d\ndetect c d", 5, 1, "duplicate detector"),
    ("circuit x\nin a 1\nphase D pi\nbs +\ndetect c d", 3, 7, "undeclared port"),
    ("circuit x\nin a 1\nbs superposed sideways symmetric +\ndetect c d", 3, 15, "unknown relation"),
    ("circuit x\nin a 1\nbs +", 3, 4, "missing 'detect"),
    ("in a 1\nbs +\ndetect c d", 1, 1, "missing 'circuit"),
    ("", 1, 1, "empty"),
])
def test_parse_errors(src, line, col, msg):
    with pytest.raises(ParseError) as info:
        parse(src)
    err = info.value
    assert (err.line, err.column) == (line, col)
    assert msg in err.message
    lines = src.splitlines() or [""]
    assert 1 <= err.line <= len(lines)
    assert err.snippet in lines[err.line - 1]


@pytest.mark.parametrize("name", sorted(dsl.BUILTINS))
def test_builtins_valid_and_round_trip(name):
    c = builtin(name)
    validate(c)
    assert parse(render(c)) == c


def test_builtin_shapes():
    hom, mzi, one = builtin("hom"), builtin("mzi"), builtin("one_input_bs")
    assert [p for p, _ in hom.inputs] == ["a", "b"] and hom.detectors == ("c", "d")
    assert hom.parameters() == {"theta"}
    assert [p for p, _ in mzi.inputs] == ["a"] and mzi.detectors == ("e", "f")
    assert Phase("d", Param("zeta")) in mzi.elements
    assert [p for p, _ in one.inputs] == ["a"] and one.n_splitters == 1


def test_unknown_builtin():
    with pytest.raises(ValueError):
        builtin("sagnac")


def test_validate_undeclared_detector():
    c = parse("circuit h\nin a 1\nbs +\ndetect c g")
    with pytest.raises(ValidationError, match="'g'"):
        validate(c)


def test_validate_unbound_parameter():
    c = parse("circuit h\nin a 1\nbs +\nphase d phi\nbs +\ndetect e f")
    with pytest.raises(ValidationError, match="unbound parameter") as info:
        validate(c)
    assert info.value.element_index == 1


def test_validate_phase_port_continuity():
    c = parse("circuit h\nin a 1\nbs +\nphase b 0.1\nbs +\ndetect e f")
    with pytest.raises(ValidationError, match="current layer") as info:
        validate(c)
    assert info.value.element_index == 1


def test_validate_needs_elements():
    with pytest.raises(ValidationError, match="no elements"):
        validate(parse("circuit h\nin a 1\ndetect a b"))


def test_validate_detectors_wrong_layer():
    with pytest.raises(ValidationError):
        validate(parse(MZI_SRC.replace("detect e f", "detect c d")))


# --- round trip property -----------------------------------------------------

phase_exprs = st.one_of(
    st.sampled_from([Param("theta"), Param("zeta")]),
    st.floats(-10, 10, allow_nan=False).map(Literal),
    st.sampled_from([Literal(math.pi), Literal(math.pi / 2), Literal(-math.pi / 2), Literal(2 * math.pi)]),
)
amplitudes = st.builds(
    Amplitude,
    st.floats(0, 5, allow_nan=False),
    st.one_of(st.none(), phase_exprs),
)


@st.composite
def circuits(draw):
    inputs = draw(st.dictionaries(st.sampled_from("ab"), amplitudes, min_size=1))
    elements = []
    layer = 0
    for _ in range(draw(st.integers(1, 5))):
        kind = draw(st.sampled_from(["bs", "sup", "phase"]))
        if kind == "phase":
            port = dsl.layer_ports(layer)[draw(st.integers(0, 1))]
            elements.append(Phase(port, draw(phase_exprs)))
        else:
            layer += 1
            if kind == "bs":
                elements.append(BS(draw(st.sampled_from(list(BasisSign)))))
            else:
                cases = [c for c in all_cases() if not c.degenerate]
                elements.append(SuperposedBS(draw(st.sampled_from(cases))))
    dets = dsl.layer_ports(layer)
    if draw(st.booleans()):
        dets = dets[::-1]
    name = draw(st.from_regex(r"[a-z][a-z0-9_]{0,8}", fullmatch=True))
    return Circuit(name, tuple(sorted(inputs.items())), tuple(elements), dets)


@given(circuits())
def test_render_parse_round_trip(c):
    text = render(c)
    again = parse(text)
    assert again == c
    assert render(again) == text


@given(st.text(max_size=80))
def test_parse_errors_point_inside_source(src):
    try:
        parse(src)
    except ParseError as err:
        lines = src.splitlines() or [""]
        assert 1 <= err.line <= len(lines)
        line = lines[err.line - 1]
        assert err.snippet in line
        assert 1 <= err.column <= max(len(line), 1)
