import pytest

from exactum.catprovider import make_chain2, make_m3, poset_spec
from exactum.fincat import (
    cauchy_completion, parse_spec, serialize_spec, slice_category, split_idempotent,
    unsplit_idempotents, validate_category,
)
from exactum.results import InputError

CHAIN2 = "category chain2\nobject 0\nobject 1\narrow u : 0 -> 1\n"
IDEMPOTENT = "category idem\nobject x\narrow e : x -> x\ncompose e . e = e\n"
SWAP = "category swap\nobject x\narrow s : x -> x\narrow t : x -> x\ncompose s . s = t\ncompose t . s = s\ncompose s . t = s\ncompose t . t = t\n"


def test_one_object_spec_is_terminal():
    c = parse_spec("category one\nobject 0\n")
    h = c.as_handle()
    assert h.objects() == ("0",)
    assert h.arrows() == [("0", "0", None)]
    assert validate_category(c).ok


def test_chain2_has_three_arrows():
    c = parse_spec(CHAIN2)
    assert len(c.as_handle().arrows()) == 3
    assert validate_category(c).ok


@pytest.mark.parametrize("text, line", [
    ("category x\nobject a\ncompose f . g = h\n", 3),
    ("category x\nobject a\nobject a\n", 3),
    ("category x\narrow f : a -> b\n", 2),
    ("category x\nobject a\nwibble\n", 3),
    ("object a\n", 1),
])
def test_parse_errors_carry_positions(text, line):
    with pytest.raises(InputError) as exc:
        parse_spec(text)
    assert exc.value.line == line


def test_missing_composite_is_reported():
    c = parse_spec("category idem\nobject x\narrow e : x -> x\n")
    assert validate_category(c).laws() == {"totality"}


def test_nonassociative_table_is_reported():
    # s.s = t, but t.s != s.t forces a triple whose two bracketings differ
    text = SWAP.replace("compose s . t = s", "compose s . t = t")
    rep = validate_category(parse_spec(text))
    assert "associativity" in rep.laws()
    assert all(len(v["arrows"]) == 3 for v in rep.violations)


def test_involution_table_is_a_category():
    # e.e = id is the cyclic group of order two, which is a lawful category
    assert validate_category(parse_spec(SWAP)).ok


def test_roundtrip():
    for text in (CHAIN2, IDEMPOTENT, SWAP, poset_spec("m3", "0pqrT", [("0", "p"), ("p", "T")])):
        c = parse_spec(text)
        again = parse_spec(serialize_spec(c))
        assert again == c and again.comp == c.comp
        assert serialize_spec(again) == serialize_spec(c)


def test_cauchy_completion_splits_the_idempotent():
    base = parse_spec(IDEMPOTENT).as_handle()
    k, embed = cauchy_completion(base)
    assert len(k.iso_classes()) == 2
    assert unsplit_idempotents(base) == [("x", "x", "e")]
    assert unsplit_idempotents(k) == []
    assert embed.violations() == [] and embed.is_full_and_faithful()
    # every object is a retract of an embedded one
    for obj in k.objects():
        x = embed.on_objects(obj[0])
        assert any(k.compose(r, s) == k.identity(obj) for s in k.hom(obj, x) for r in k.hom(x, obj))


def test_cauchy_completion_of_a_poset_is_itself():
    k, embed = cauchy_completion(make_m3())
    assert len(k.objects()) == 5 and embed.is_full_and_faithful()


def test_split_idempotent_of_identity():
    c = make_chain2()
    assert split_idempotent(c, c.identity("1"))[0] == "1"


def test_slices():
    s, proj = slice_category(make_chain2(), "1")
    assert len(s.objects()) == 2 and len(s.arrows()) == 3
    assert proj.violations() == []
    s, _ = slice_category(make_m3(), "p")
    assert [o[0] for o in s.objects()] == ["0", "p"]
    with pytest.raises(InputError):
        slice_category(make_m3(), "z")
