"""Smoke test for the pyexpfield extension module.

Build it with `maturin develop -m crates/python/Cargo.toml`, or
`cargo build -p expfield-py --features extension-module` and put
`target/debug/libpyexpfield.so` on the path as `pyexpfield.so`.
"""

import pyexpfield as ef


def main():
    v = ef.Variety(1, ["x1 = y1"])
    assert v.dimension() == 1
    assert v.ideal() == ["x1 - y1"]
    assert v.additive_freeness()["status"] == "free"
    assert v.multiplicative_freeness()["status"] == "free-up-to-bound"
    assert v.rotundity(bound=3)["status"] == "rotund-up-to"

    k = ef.EField([], kernel="tau")
    assert k.delta(["tau"])["delta"] == 0
    f, report = k.extend(v, ["a"])
    assert report["exponentially_algebraic"]
    assert f.delta(["a"], over=["tau"])["delta"] == 0
    assert f.strong(["tau"])["status"] == "strong-up-to"

    collapse = ef.EField(["b"], relations=["exp(b) = b", "exp(b)^2 = b"])
    assert collapse.schanuel(["b"])["verdict"] == "violated"

    for depth in range(3):
        _, w = ef.iterated_exp_config(depth)
        assert w.dimension() == depth + 1
    assert ef.iterated_exp_config(0)[1].same_ideal(v)

    point = ef.Variety(1, ["x1", "y1 = 1"])
    assert ef.schanuel_axiom(point) == "forall x1. exists m1 in Z \\ 0. (x1 = 0 & exp(x1) = 1 -> m1*x1 = 0)"
    try:
        ef.schanuel_axiom(v)
    except ValueError as e:
        assert "wrong dimension" in str(e)
    else:
        raise AssertionError("dimension 1 in G^1 must be rejected")

    assert ef.parse_formula("forall x1. exp(x1) = 1 -> 2*x1 = 0") == "forall x1. (exp(x1) = 1 -> 2*x1 = 0)"
    assert "uncountable" in ef.formula_ast("(Q x1) x1 = x1")
    assert ef.derivative(1, "x1*exp(x1)", 1) == "x1*exp(x1) + exp(x1)"

    report = ef.run_session("variety V in G^1 { y1 - x1 = 0 }\nanalyze V\n")
    assert report["schema"] == 1 and report["exit_code"] == 0
    try:
        ef.run_session("analyze W\n")
    except ValueError as e:
        assert "undefined: W" in str(e)
    else:
        raise AssertionError("undefined names must be rejected")
    print("pyexpfield smoke test passed")


if __name__ == "__main__":
    main()
