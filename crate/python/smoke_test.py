"""Quick check that the extension module loads and agrees with the CLI goldens.

Build and install first:
    pip install maturin
    pip install --no-build-isolation ./crates/py
"""

import pydlaf

RUNNING = "x:=1; ((?([x:=x+1]T && x=2); y:=1) u (?(!([x:=x+1]T && x=2)); y:=2))"


def main():
    p = pydlaf.Program(RUNNING)
    kind, final, trace = p.run({"x": 0, "y": 0})
    assert kind == "completed", kind
    assert final == {"x": 2, "y": 1}, final
    assert trace[0] == "x:=1", trace
    assert p.effects({"x": 0, "y": 0}) == [("x", 2)]
    assert p.canonical() == ["x:=1", "?([x:=x+1]T && x=2)", "y:=1"]

    loop = "x:=0; y:=0; (?([x:=x+1]T && x<=3); y:=y+1)*; ?(!([x:=x+1]T && x<=3))"
    assert pydlaf.Program(loop).effects() == [("x", 1), ("x", 2), ("x", 3), ("x", 4)]

    v = pydlaf.Program("x:=1;?([x:=x+1]T);y:=1").classify("1")
    assert v["marginal"] and v["h_E_exists"] and v["delta"] == [("x", 2)], v
    assert not pydlaf.Program("x:=1;?([x:=x+1]T);x:=x+1").classify("1")["marginal"]

    f = pydlaf.Formula("[x:=x+1]T && x=2")
    assert f.holds({"x": 1}) == (True, {"x": 2})
    assert str(pydlaf.Formula("!(x=1 && y=2)").normal_form()) == "!(x=1) || !(y=2)"

    assert pydlaf.sos("x:=0; WHILE (x:=x+1 && x<=2) DO y:=y+1") == {"x": 3, "y": 2}
    assert pydlaf.sos("ABORT") is None
    try:
        pydlaf.Program("(?(T))*; ?(F)").run(max_steps=20)
    except RuntimeError as e:
        assert "divergence" in str(e)
    else:
        raise AssertionError("expected the budget to run out")
    try:
        pydlaf.Program("x:=")
    except ValueError:
        pass
    else:
        raise AssertionError("expected a syntax error")

    assert pydlaf.scl_check("CP1", trials=30) == (True, 0)
    passed, violations = pydlaf.scl_check("CPmem", trials=30)
    assert passed and violations > 0
    assert len(pydlaf.schemas()) == 33

    assert pydlaf.pga_canon("(a;b)^w;c")[0] == "(a; b)^w"
    assert pydlaf.pga_behavior("#0;a") == "D"
    assert pydlaf.pga_bisimilar("a;b;!", "a;#1;b;!")
    assert pydlaf.pga_project("+(a && b); c; !") == "u(+a; u(+b; #2); #2); c; !"
    x1 = "+([x:=x+1]T && x=2); u(w[x=2]; !); w[x!=2]; !"
    assert all(pydlaf.pga_similar(x1, {"x": k}) for k in range(8))
    assert str(pydlaf.pga_translate("x:=1")) == "x:=1; ?(F)"
    print("smoke test ok")


if __name__ == "__main__":
    main()
