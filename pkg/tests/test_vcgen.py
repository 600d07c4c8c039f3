import random

from gen import gen_straightline_method, param_box_models, run_method_concretely
from refjava.checker import CheckOptions, check_sources
from refjava.frontend import base_typecheck, parse_program


def run(source: str, **opts):
    return check_sources([("t.java", source)], CheckOptions(**opts) if opts else None)


def diags(source: str):
    return run(source).diagnostics


# ---------------------------------------------------------------------------
# paper listings


LISTING2 = """\
class Ranges {
    @Refinement("_ >= a && _ <= b")
    public static int inRange(int a, @Refinement("b > a") int b) {
        return a + 1;
    }
}
"""


def test_listing2_body_checks_clean():
    # b > a over the integers tightens to b >= a + 1, so a+1 is in range.
    assert diags(LISTING2) == []


def with_use_method(calls: str) -> str:
    return LISTING2[: LISTING2.rindex("}")] + (
        f"    static void use() {{ {calls} }}\n}}\n"
    )


def test_listing2_good_and_bad_calls():
    ds = diags(with_use_method("inRange(10, 20); inRange(10, 2);"))
    assert len(ds) == 1
    assert ds[0].expected_display == "(b > a)"
    assert ds[0].found_display == "(b == 2) && (a == 10)"


def test_listing1_single_error_at_second_assignment():
    src = (
        "class Colors {\n"
        "    void demo() {\n"
        '        @Refinement("r >= 0 && r <= 255")\n'
        "        int r;\n"
        "        r = 90;\n"
        "        r = 200 + 60;\n"
        "    }\n"
        "}\n"
    )
    ds = diags(src)
    assert len(ds) == 1
    assert ds[0].start_line == 6


def test_unannotated_method_never_flagged():
    src = (
        "class C {\n"
        "    int f(int n) {\n"
        "        int acc = 0;\n"
        "        while (n > 0) { acc = acc + n % 3; n = n - 1; }\n"
        "        if (acc > 10) acc = acc / 2; else acc = -acc;\n"
        "        return acc;\n"
        "    }\n"
        "}\n"
    )
    assert diags(src) == []


# ---------------------------------------------------------------------------
# statement forms


def test_branch_merge_keeps_guarded_facts():
    # Oracle: for x, y in [-3, 3], the merged branches always leave y != 0.
    for x in range(-3, 4):
        y = 1 if x > 0 else -1
        assert y != 0
    src = (
        "class C {\n"
        "    void f(int x) {\n"
        '        @Refinement("y != 0")\n'
        "        int y = 5;\n"
        "        if (x > 0) y = 1; else y = -1;\n"
        '        @Refinement("z != 0")\n'
        "        int z = y;\n"
        "    }\n"
        "}\n"
    )
    assert diags(src) == []


def test_branch_merge_is_precise_not_lossy():
    # After the branches, y is exactly 1 or -1; a follow-up range check
    # must hold, which fails if the merge falls back to declarations.
    src = (
        "class C {\n"
        "    void f(int x) {\n"
        '        @Refinement("y != 0")\n'
        "        int y = 5;\n"
        "        if (x > 0) y = 1; else y = -1;\n"
        '        @Refinement("z >= -1 && z <= 1")\n'
        "        int z = y;\n"
        "    }\n"
        "}\n"
    )
    assert diags(src) == []


def test_branch_violation_found_in_one_arm():
    src = (
        "class C {\n"
        "    void f(int x) {\n"
        '        @Refinement("y > 0")\n'
        "        int y = 5;\n"
        "        if (x > 0) y = 1; else y = 0;\n"
        "    }\n"
        "}\n"
    )
    ds = diags(src)
    assert len(ds) == 1
    assert ds[0].start_line == 5


def test_while_inductive_check_and_exit_fact():
    # Oracle: i >= 0 and i < 10 imply i + 1 >= 0; exit knows !(i < 10).
    for i in range(0, 10):
        assert i + 1 >= 0
    src = (
        "class C {\n"
        '    @Refinement("_ >= 10")\n'
        "    int f() {\n"
        '        @Refinement("i >= 0")\n'
        "        int i = 0;\n"
        "        while (i < 10) i = i + 1;\n"
        "        return i;\n"
        "    }\n"
        "}\n"
    )
    assert diags(src) == []


def test_while_body_violating_invariant_is_flagged():
    src = (
        "class C {\n"
        "    void f() {\n"
        '        @Refinement("i >= 0")\n'
        "        int i = 0;\n"
        "        while (i < 10) i = i - 1;\n"
        "    }\n"
        "}\n"
    )
    ds = diags(src)
    assert len(ds) == 1


def test_while_havoc_drops_pre_loop_facts():
    # i starts at 0 but grows inside the loop, so claiming i <= 0 after
    # the body must fail even though it held on entry.
    src = (
        "class C {\n"
        "    void f(boolean go) {\n"
        "        int i = 0;\n"
        "        while (go) i = i + 1;\n"
        '        @Refinement("z <= 0")\n'
        "        int z = i;\n"
        "    }\n"
        "}\n"
    )
    assert len(diags(src)) == 1


def test_return_checks_against_declared_refinement():
    src = (
        "class C {\n"
        '    @Refinement("_ > n")\n'
        "    int f(int n) { return n - 1; }\n"
        "}\n"
    )
    ds = diags(src)
    assert len(ds) == 1
    assert ds[0].expected_display == "(_ > n)"


def test_error_recovery_reports_each_independent_violation():
    src = (
        "class C {\n"
        "    void f() {\n"
        '        @Refinement("x >= 0")\n'
        "        int x = -1;\n"
        "        x = -2;\n"
        '        @Refinement("y >= 0")\n'
        "        int y = -3;\n"
        "    }\n"
        "}\n"
    )
    assert len(diags(src)) == 3


def test_error_recovery_uses_declaration_after_failure():
    # After the failed write, x falls back to x >= 0, so the next check
    # succeeds rather than cascading.
    src = (
        "class C {\n"
        "    void f() {\n"
        '        @Refinement("x >= 0")\n'
        "        int x = -1;\n"
        '        @Refinement("y >= 0")\n'
        "        int y = x;\n"
        "    }\n"
        "}\n"
    )
    assert len(diags(src)) == 1


def test_path_condition_restored_after_if():
    # If the branch guard leaked past the merge, the second check would
    # wrongly pass; the declaration must be violated for x == 0.
    src = (
        "class C {\n"
        "    void f(int x) {\n"
        "        int y = 0;\n"
        "        if (x > 0) y = 1;\n"
        '        @Refinement("z > 0")\n'
        "        int z = x;\n"
        "    }\n"
        "}\n"
    )
    assert len(diags(src)) == 1


def test_field_write_checked_and_read_assumed():
    src = (
        "class C {\n"
        '    @Refinement("f >= 0")\n'
        "    int f;\n"
        "    void bad() { this.f = -1; }\n"
        "    void ok() { this.f = 3; }\n"
        '    @Refinement("_ >= 0")\n'
        "    int read() { return this.f; }\n"
        "}\n"
    )
    ds = diags(src)
    assert len(ds) == 1
    assert ds[0].start_line == 4


def test_calls_inside_conditions_are_checked():
    src = (
        "class C {\n"
        "    static int half(@Refinement(\"n >= 0\") int n) { return n; }\n"
        "    void f() {\n"
        "        if (half(-1) > 0) { int x = 1; }\n"
        "    }\n"
        "}\n"
    )
    assert len(diags(src)) == 1


def test_no_refinements_flag_disables_value_checks():
    src = (
        "class C {\n"
        "    void f() {\n"
        '        @Refinement("x >= 0")\n'
        "        int x = -1;\n"
        "    }\n"
        "}\n"
    )
    assert run(src, refinements=False).diagnostics == []


def test_determinism_same_input_same_output():
    src = with_use_method("inRange(10, 2); inRange(1, 0);")
    first = [(d.file, d.span, d.kind, d.message) for d in diags(src)]
    second = [(d.file, d.span, d.kind, d.message) for d in diags(src)]
    assert first == second and len(first) == 2


# ---------------------------------------------------------------------------
# differential soundness on straight-line methods (sample; the acceptance
# suite runs the larger corpus)


def test_differential_straightline_sample():
    rng = random.Random(2024)
    disagreements = []
    for i in range(120):
        source = gen_straightline_method(rng)
        result = check_sources([("g.java", source)])
        program = parse_program([("g.java", source)])
        info, tdiags = base_typecheck(program)
        assert tdiags == [], (source, tdiags)
        method = program.compilation_units[0].decls[0].methods[0]
        concrete_ok = all(
            run_method_concretely(method, model)
            for model in param_box_models(method)
        )
        checker_ok = not result.diagnostics
        if checker_ok != concrete_ok:
            disagreements.append((i, source, checker_ok, concrete_ok))
    assert not disagreements, disagreements[0]


# ---------------------------------------------------------------------------
# aliases end to end, scoping, and merge precision


def test_refinement_alias_expands_in_checks():
    src = (
        '@RefinementAlias("Byte(v) -> v >= 0 && v <= 255")\n'
        "class C {\n"
        "    void f() {\n"
        '        @Refinement("Byte(r)")\n'
        "        int r = 300;\n"
        "    }\n"
        "}\n"
    )
    ds = diags(src)
    assert len(ds) == 1
    assert ds[0].expected_display == "(r >= 0 && r <= 255)"
    ok = src.replace("300", "200")
    assert diags(ok) == []


def test_alias_chains_and_parameters():
    src = (
        '@RefinementAlias("Positive(x) -> x > 0")\n'
        '@RefinementAlias("Small(x) -> Positive(x) && x < 10")\n'
        "class C {\n"
        '    @Refinement("Small(_)")\n'
        "    static int f() { return 3; }\n"
        "}\n"
    )
    assert diags(src) == []


def test_unknown_alias_is_annotation_error():
    src = (
        "class C {\n"
        "    void f() {\n"
        '        @Refinement("Nope(r)")\n'
        "        int r = 1;\n"
        "    }\n"
        "}\n"
    )
    ds = diags(src)
    assert len(ds) == 1
    assert ds[0].kind == "annotation"
    assert "unknown predicate alias Nope" in ds[0].message


def test_aliases_scoped_to_declaring_file():
    file_a = (
        '@RefinementAlias("Byte(v) -> v >= 0 && v <= 255")\n'
        "class A {\n"
        '    @Refinement("Byte(_)") static int f() { return 7; }\n'
        "}\n"
    )
    file_b = (
        "class B {\n"
        '    @Refinement("Byte(_)") static int g() { return 7; }\n'
        "}\n"
    )
    result = check_sources([("a.java", file_a), ("b.java", file_b)])
    assert len(result.diagnostics) == 1
    assert result.diagnostics[0].file == "b.java"
    assert result.diagnostics[0].kind == "annotation"


def test_guarded_merge_tracks_ghosts_through_branches():
    # Under the branch x is exactly 6, otherwise exactly 5; both are
    # provable only if ghost facts survive the merge guarded.
    src = (
        "class C {\n"
        "    void f(boolean c) {\n"
        "        int x = 5;\n"
        "        if (c) x = x + 1;\n"
        '        @Refinement("z >= 5 && z <= 6")\n'
        "        int z = x;\n"
        "    }\n"
        "}\n"
    )
    assert diags(src) == []
    tight = src.replace("z >= 5 && z <= 6", "z == 5")
    assert len(diags(tight)) == 1


def test_sibling_blocks_may_reuse_local_names():
    src = (
        "class C {\n"
        "    void f() {\n"
        '        { @Refinement("t > 0") int t = 1; }\n'
        '        { @Refinement("t < 0") int t = -1; }\n'
        "    }\n"
        "}\n"
    )
    assert diags(src) == []


def test_while_condition_call_obligations_checked():
    src = (
        "class C {\n"
        '    static boolean pred(@Refinement("n >= 0") int n) { return n > 0; }\n'
        "    void f() {\n"
        "        while (pred(-1)) { int x = 1; }\n"
        "    }\n"
        "}\n"
    )
    assert len(diags(src)) == 1


def test_call_with_compound_actuals_substitutes_terms():
    # Formal-to-actual substitution feeds 2*(x+1)-style terms into the
    # contract; the solver must distribute them linearly.
    src = (
        "class C {\n"
        '    @Refinement("_ >= a && _ <= b")\n'
        "    static int clamp(int a, @Refinement(\"b > a\") int b) { return a + 1; }\n"
        "    void f(int x) {\n"
        '        @Refinement("y >= 2 * x + 2")\n'
        "        int y = clamp(2 * (x + 1), 2 * x + 3);\n"
        "    }\n"
        "}\n"
    )
    assert diags(src) == []
    # A bound that does not hold for all integers is rejected.
    bad = src.replace("2 * x + 3", "3 * x + 9999")
    assert len(diags(bad)) == 1


def test_call_argument_out_of_fragment_keeps_soundness():
    # x / 2 cannot be reasoned about, so the call's contract cannot be
    # proved; one diagnostic, not a crash and not a silent pass.
    src = (
        "class C {\n"
        "    static int take(@Refinement(\"n >= 0\") int n) { return n; }\n"
        "    void f(int x) {\n"
        "        take(x / 2);\n"
        "    }\n"
        "}\n"
    )
    ds = diags(src)
    assert len(ds) == 1
    assert ds[0].kind == "refinement"
