import random

import pytest
from hypothesis import given, settings, strategies as st

from catflow.acset import (
    ACSet,
    Part,
    coproduct,
    export_tables,
    identity,
    import_tables,
    read_tables,
    validate,
    write_tables,
)
from catflow.errors import SchemaError
from catflow.homs import is_isomorphic
from catflow.models import sir_sfd, sv_sfd
from catflow.schemas import SchCLD, SchSFD, SchSSD, build_cld, build_sfd

from oracles import random_instance


def test_add_parts_counts():
    inst = ACSet(SchSFD)
    assert inst.add_parts("S", 3) == [Part("S", 1), Part("S", 2), Part("S", 3)]
    assert str(Part("S", 2)) == "S#2"


def test_add_zero_parts_is_identity():
    inst = sir_sfd()
    before = inst.copy()
    assert inst.add_parts("S", 0) == []
    assert inst == before


def test_sir_part_counts():
    c = sir_sfd().counts()
    assert (c["S"], c["F"], c["V"], c["P"], c["SV"], c["I"], c["O"], c["LS"]) == (3, 2, 5, 3, 1, 2, 2, 3)


def test_set_subpart_inflow_row():
    inst = ACSet(SchSFD)
    inst.add_parts("S", 3)
    inst.add_parts("F", 1)
    (i,) = inst.add_parts("I", 1)
    inst.set_subpart(i, "ifn", Part("F", 1))
    inst.set_subpart(i, "is", Part("S", 2))
    assert (inst.subpart(i, "ifn"), inst.subpart(i, "is")) == (1, 2)


def test_set_subpart_cld_polarity():
    cld = build_cld(["x", "y"], [("x", "y", "-")])
    cld.set_subpart(Part("L", 1), "polarity", Part("A", 1))
    assert cld.column("sgn")[cld.subpart(1, "polarity") - 1] == "+"


def test_set_subpart_codomain_mismatch():
    inst = ACSet(SchSFD)
    inst.add_parts("F", 1)
    inst.add_parts("I", 1)
    with pytest.raises(SchemaError):
        inst.set_subpart(Part("I", 1), "is", Part("F", 1))


def test_set_subpart_wrong_domain_and_value_type():
    inst = ACSet(SchSFD)
    inst.add_parts("S", 1)
    with pytest.raises(SchemaError):
        inst.set_subpart(Part("S", 1), "ifn", 1)
    inst.add_parts("V", 1)
    with pytest.raises(SchemaError):
        inst.set_subpart(Part("V", 1), "vop", "^")
    with pytest.raises(SchemaError):
        inst.set_subpart(Part("V", 1), "vconst", "x")


def test_validate_clean_and_violations():
    assert validate(sir_sfd()) == []
    inst = sir_sfd()
    inst._cols["ifn"][0] = None
    v = validate(inst)
    assert len(v) == 1 and v[0].column == "ifn" and v[0].reason == "unset"
    inst = sir_sfd()
    inst._cols["is"][0] = 5
    v = validate(inst)
    assert len(v) == 1 and v[0].column == "is" and v[0].row == 1 and "out of range" in v[0].reason


def test_coproduct_unit_and_counts():
    sir = sir_sfd()
    out, ia, _ = coproduct(sir, ACSet(SchSFD))
    assert is_isomorphic(out, sir, ignore_attrs=())
    a = build_sfd(stocks=["x"])
    out, ia, ib = coproduct(a, a)
    assert out.nparts("S") == 2 and ia["S"] == (1,) and ib["S"] == (2,)
    out, _, _ = coproduct(sir, sv_sfd())
    assert out.nparts("S") == 5
    assert validate(out) == []


def test_export_layout_sir():
    t = export_tables(sir_sfd())
    assert t["I"].columns == ["is", "ifn"] or t["I"].columns == ["ifn", "is"]
    rows = {dict(zip(t["I"].columns, r))["ifn"]: dict(zip(t["I"].columns, r))["is"] for r in t["I"].rows}
    assert rows == {1: 2, 2: 3}  # inf -> I, rec -> R
    assert len(t) == len(SchSFD.objects)


def test_export_empty_instance():
    t = export_tables(ACSet(SchSSD))
    assert all(len(tab.rows) == 0 for tab in t.values())


def test_table_csv_roundtrip(tmp_path):
    sir = sir_sfd()
    paths = write_tables(sir, str(tmp_path))
    assert len(paths) == len(SchSFD.objects)
    assert read_tables(SchSFD, str(tmp_path)) == sir


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10_000), st.sampled_from([SchCLD, SchSSD, SchSFD]))
def test_export_import_roundtrip(seed, schema):
    inst = random_instance(schema, random.Random(seed), 4)
    assert import_tables(schema, export_tables(inst)) == inst


def test_identity_and_then():
    sir = sir_sfd()
    idh = identity(sir)
    assert idh.then(idh) == idh
    assert idh(Part("S", 2)) == Part("S", 2)
