import pytest

from catflow.acset import Part
from catflow.errors import FormulaError
from catflow.formulas import (
    Literal,
    Op,
    Ref,
    aux_order,
    evaluate,
    reconstruct_closure,
    reconstruct_formula,
    render,
    sum_var_formula,
)
from catflow.models import sir_sfd
from catflow.schemas import build_sfd


def _env(sir, **values):
    env = {}
    for name, val in values.items():
        for attr in ("sname", "svname", "pname", "vname"):
            hits = sir.find(attr, name)
            if hits:
                env[hits[0]] = val
    return env


def test_prevalence_formula():
    sir = sir_sfd()
    e = reconstruct_formula(sir, sir.lookup("vname", "v_prevalence"))
    assert e == Op("/", (Ref(Part("S", 2), "I"), Ref(Part("SV", 1), "N")))
    assert render(e) == "(I / N)"


def test_sum_variable_formula():
    sir = sir_sfd()
    assert render(sum_var_formula(sir, 1)) == "(S + I + R)"
    lone = build_sfd(stocks=["x"], sum_vars=[("M", [])])
    assert sum_var_formula(lone, 1) == Literal(0.0)
    one = build_sfd(stocks=["x"], sum_vars=[("M", ["x"])])
    assert render(sum_var_formula(one, 1)) == "(x)"


def test_literal_constant():
    sfd = build_sfd(aux_vars=[("k", "const", 2.5)])
    assert reconstruct_formula(sfd, 1) == Literal(2.5)


def test_duplicate_position():
    sfd = build_sfd(stocks=["a", "b"], aux_vars=[("v", "+", ["a", "b"])])
    sfd._cols["lvposition"] = [1, 1]
    with pytest.raises(FormulaError, match="duplicate"):
        reconstruct_formula(sfd, 1)


def test_gap_and_arity_errors():
    sfd = build_sfd(stocks=["a", "b"], aux_vars=[("v", "+", ["a", "b"])])
    sfd._cols["lvposition"] = [1, 3]
    with pytest.raises(FormulaError):
        reconstruct_formula(sfd, 1)
    sfd = build_sfd(stocks=["a", "b", "c"], aux_vars=[("v", "+", ["a", "b", "c"])])
    sfd._cols["vop"] = ["/"]
    with pytest.raises(FormulaError):
        reconstruct_formula(sfd, 1)


def test_cycle_rejected():
    sfd = build_sfd(stocks=["a"], aux_vars=[("u", "+", ["a", "w"]), ("w", "+", ["u"])])
    with pytest.raises(FormulaError):
        reconstruct_formula(sfd, 1)


def test_evaluate_basics():
    sir = sir_sfd()
    prev = reconstruct_formula(sir, sir.lookup("vname", "v_prevalence"))
    assert evaluate(prev, {Part("S", 2): 10.0, Part("SV", 1): 1000.0}) == 0.01
    env = {Part("S", 1): 990.0, Part("S", 2): 10.0, Part("S", 3): 0.0}
    assert evaluate(sum_var_formula(sir, 1), env) == 1000.0
    with pytest.raises(FormulaError):
        evaluate(prev, {Part("S", 2): 1.0, Part("SV", 1): 0.0})
    with pytest.raises(FormulaError):
        evaluate(prev, {})


def test_force_of_infection_chain():
    sir = sir_sfd()
    e = reconstruct_closure(sir, sir.lookup("vname", "v_newInfections"))
    assert render(e) == "(S * (beta * (c * (I / N))))"
    env = _env(sir, S=990.0, I=10.0, N=1000.0, beta=0.05, c=10.0)
    assert evaluate(e, env) == pytest.approx(990 * 0.05 * 10 * 10 / 1000)


def test_aux_order_respects_dependencies():
    sir = sir_sfd()
    order = aux_order(sir)
    names = [sir.subpart(i, "vname") for i in order]
    assert names.index("v_prevalence") < names.index("v_meanInfectiousContactsPerS")
    assert names.index("v_forceOfInfection") < names.index("v_newInfections")
    assert sorted(order) == list(range(1, 6))
