import pytest

from refjava.frontend import (
    ClassDecl,
    InterfaceDecl,
    base_typecheck,
    parse_program,
    program_to_source,
)
from refjava.frontend import ast as fast

LISTING1 = """\
class Colors {
    void demo() {
        @Refinement("r >= 0 && r <= 255")
        int r;
        r = 90;
        r = 200 + 60;
    }
}
"""

LISTING2 = """\
class Ranges {
    @Refinement("_ >= a && _ <= b")
    public static int inRange(int a, @Refinement("b > a") int b) {
        return a + 1;
    }

    static void use() {
        inRange(10, 20);
        inRange(10, 2);
    }
}
"""

LISTING3 = """\
@ExternalRefinementsFor("java.net.Socket")
@StateSet({"unconnected", "bound", "connected", "closed"})
public interface SocketRefinements {
    @StateRefinement(to="unconnected(this)")
    public void Socket();

    @StateRefinement(from="unconnected(this)", to="bound(this)")
    public void bind(SocketAddress add);

    @StateRefinement(from="bound(this)", to="connected(this)")
    public void connect(SocketAddress add, int timeout);

    @StateRefinement(from="connected(this)")
    public void sendUrgentData(int n);

    @StateRefinement(to="closed(this)")
    public void close();
}
"""


def parse_ok(*sources):
    result = parse_program([(f"f{i}.java", s) for i, s in enumerate(sources)])
    assert not isinstance(result, list), result
    return result


# ---------------------------------------------------------------------------
# parsing


def test_parse_listing1_annotation_captured_verbatim():
    program = parse_ok(LISTING1)
    (unit,) = program.compilation_units
    (cls,) = unit.decls
    assert isinstance(cls, ClassDecl)
    (method,) = cls.methods
    decl = method.body.stmts[0]
    assert isinstance(decl, fast.LocalDecl)
    assert decl.annotation.kind == "Refinement"
    assert decl.annotation.payload().text == "r >= 0 && r <= 255"


def test_parse_empty_input():
    program = parse_ok()
    assert program.compilation_units == []


def test_parse_listing3_interface():
    program = parse_ok(LISTING3)
    (decl,) = program.compilation_units[0].decls
    assert isinstance(decl, InterfaceDecl)
    state_sets = [a for a in decl.annotations if a.kind == "StateSet"]
    assert len(state_sets) == 1
    assert [p.text for p in state_sets[0].payloads] == [
        "unconnected", "bound", "connected", "closed",
    ]
    assert len(decl.methods) == 5
    for m in decl.methods:
        assert len(m.state_annotations) == 1


def test_parse_state_refinement_named_payloads():
    program = parse_ok(LISTING3)
    (decl,) = program.compilation_units[0].decls
    bind = next(m for m in decl.methods if m.name == "bind")
    ann = bind.state_annotations[0]
    assert ann.payload("from").text == "unconnected(this)"
    assert ann.payload("to").text == "bound(this)"
    close = next(m for m in decl.methods if m.name == "close")
    assert close.state_annotations[0].payload("from") is None


def test_payload_span_points_inside_string():
    program = parse_ok(LISTING1)
    decl = program.compilation_units[0].decls[0].methods[0].body.stmts[0]
    payload = decl.annotation.payload()
    text = program.source_map.text("f0.java")
    span = payload.full_span()
    assert text[span.start : span.end] == "r >= 0 && r <= 255"


def test_syntax_error_reported_with_span():
    result = parse_program([("bad.java", "class A { void f( { } }")])
    assert isinstance(result, list)
    (diag,) = result
    assert diag.kind == "syntax"
    assert diag.start_line == 1


def test_duplicate_class_rejected():
    result = parse_program([("a.java", "class A { }"), ("b.java", "class A { }")])
    assert isinstance(result, list)
    assert "duplicate" in result[0].message


def test_duplicate_method_rejected():
    result = parse_program([("a.java", "class A { void f() { } void f() { } }")])
    assert isinstance(result, list)
    assert "duplicate" in result[0].message


# ---------------------------------------------------------------------------
# round trip


def _round_trip(source: str):
    first = parse_ok(source)
    printed = program_to_source(first)["f0.java"]
    second = parse_program([("f0.java", printed)])
    assert not isinstance(second, list), printed
    assert first.compilation_units == second.compilation_units


@pytest.mark.parametrize("source", [LISTING1, LISTING2, LISTING3])
def test_round_trip_listings(source):
    _round_trip(source)


def test_round_trip_control_flow():
    _round_trip(
        """
        class C {
            int f;
            int g(int n, boolean flag) {
                int acc = 0;
                while (n > 0) {
                    if (flag && n % 2 == 0) { acc = acc + n; }
                    else acc = acc - this.f * 2;
                    n = n - 1;
                }
                return -acc + (n - 1);
            }
            void h() { g(3 + 4 * 2, true); }
        }
        """
    )


# ---------------------------------------------------------------------------
# base typecheck


def typecheck(*sources):
    program = parse_ok(*sources)
    return base_typecheck(program)


def test_int_assign_ok():
    info, diags = typecheck("class A { void f() { int r; r = 90; } }")
    assert diags == []
    assert info is not None


def test_bool_to_int_mismatch():
    info, diags = typecheck("class A { void f() { int r; r = true; } }")
    assert info is None
    assert any("assign" in d.message for d in diags)
    assert all(d.kind == "basetype" for d in diags)


def test_call_resolution_listing2():
    program = parse_ok(LISTING2)
    info, diags = base_typecheck(program)
    assert diags == []
    use = program.compilation_units[0].decls[0].methods[1]
    call = use.body.stmts[0].expr
    assert call.base_type == "int"
    assert call.resolved_class == "Ranges"


def test_unknown_name():
    info, diags = typecheck("class A { void f() { x = 1; } }")
    assert any("unknown name x" in d.message for d in diags)


def test_arity_mismatch():
    info, diags = typecheck(
        "class A { int g(int x) { return x; } void f() { g(1, 2); } }"
    )
    assert any("expects 1 argument" in d.message for d in diags)


def test_condition_must_be_boolean():
    info, diags = typecheck("class A { void f() { if (1) { } } }")
    assert any("condition" in d.message for d in diags)


def test_static_cannot_use_this():
    info, diags = typecheck("class A { int f; static int g() { return this.f; } }")
    assert any("static" in d.message for d in diags)


def test_external_interface_synthesizes_class():
    info, diags = typecheck(
        LISTING3,
        """
        class Main {
            void run() {
                Socket s = new Socket();
                SocketAddress a = new SocketAddress();
                s.bind(a);
                s.connect(a, 100);
                s.sendUrgentData(1);
                s.close();
            }
        }
        """,
    )
    assert diags == []
    socket = info.classes["Socket"]
    assert socket.external
    assert socket.qualified_name == "java.net.Socket"
    assert set(socket.methods) == {"bind", "connect", "sendUrgentData", "close"}
    assert socket.constructor is not None
    assert "SocketAddress" in info.classes


def test_implicit_field_reference_resolved():
    program = parse_ok("class A { int f; int g() { return f + 1; } }")
    info, diags = base_typecheck(program)
    assert diags == []
    ret = program.compilation_units[0].decls[0].methods[0].body.stmts[0]
    var = ret.value.left
    assert var.field_of == "A"


def test_round_trip_generated_programs():
    import random

    from gen import gen_plain_program

    rng = random.Random(11)
    for _ in range(40):
        source = gen_plain_program(rng)
        first = parse_program([("f0.java", source)])
        assert not isinstance(first, list), source
        printed = program_to_source(first)["f0.java"]
        second = parse_program([("f0.java", printed)])
        assert not isinstance(second, list), printed
        assert first.compilation_units == second.compilation_units, source


def test_diagnostic_spans_stay_inside_file():
    from refjava.checker import check_sources

    broken = [
        "class A { void f() { int x = ; } }",
        "class A { void f() { x = 1; } }",
        'class A { void f() { @Refinement("x >") int x = 1; } }',
        "class A { void f( { } }",
    ]
    for source in broken:
        result = check_sources([("b.java", source)])
        assert result.diagnostics, source
        for d in result.diagnostics:
            assert 0 <= d.span.start <= d.span.end <= len(source), (source, d)
