import pytest

from rulesmith import corpus
from rulesmith.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def rule_lines(text):
    return [l for l in text.splitlines() if "->" in l]


def test_gen_and(capsys):
    code, out, _ = run(capsys, "gen", "--kind", "eq", "--table", "corpus/and.ct")
    assert code == 0
    assert out.splitlines()[0] == "rules and equality"
    assert len(rule_lines(out)) == 6
    assert "z=1 -> x != 0, y != 0" in out


def test_gen_by_name_and_to_file(capsys, tmp_path):
    dest = tmp_path / "fork.rules"
    code, out, _ = run(capsys, "gen", "--kind", "mem", "--table", "fork", "--out", str(dest))
    assert code == 0 and out == ""
    assert len(rule_lines(dest.read_text())) == 24


def test_gen_ungrouped(capsys):
    _, out, _ = run(capsys, "gen", "--table", "and", "--ungrouped")
    assert len(rule_lines(out)) == 7


def test_gen_is_byte_deterministic(capsys):
    _, a, _ = run(capsys, "gen", "--kind", "mem", "--table", "msign")
    _, b, _ = run(capsys, "gen", "--kind", "mem", "--table", "msign", "--workers", "2")
    assert a == b


def test_check_nonarc(capsys):
    assert run(capsys, "check", "--csp", "fixtures/nonarc.csp", "--consistency", "rule")[:2] == (0, "rule-consistent: yes\n")
    assert run(capsys, "check", "--csp", "fixtures/nonarc.csp", "--consistency", "arc")[:2] == (1, "arc-consistent: no\n")
    assert run(capsys, "check", "--csp", "fixtures/nonarc.csp", "--consistency", "memrule")[0] == 1


def test_solve_puzzle(capsys):
    code, out, _ = run(capsys, "solve", "--csp", "fixtures/puzzle.csp", "--stats", "--all")
    assert code == 0
    sols = [l for l in out.splitlines() if not l.startswith("stats")]
    assert len(sols) == 1
    assert "room_B=dining" in sols[0] and "item_F=frame" in sols[0]
    assert "splits=0" in out
    assert "stats: solved by propagation alone" in out


def test_solve_trace(capsys):
    _, out, _ = run(capsys, "solve", "--csp", "fixtures/puzzle.csp", "--trace")
    steps = [l for l in out.splitlines() if l.startswith("step ")]
    assert len(steps) == 12


def test_solve_impossible_scene(capsys):
    code, out, _ = run(capsys, "solve", "--csp", "fixtures/impossible.csp", "--rules", "mem", "--stats")
    assert code == 1
    assert "splits=0" in out and out.endswith("no solution\n")


def test_solve_allen_all(capsys):
    code, out, _ = run(capsys, "solve", "--csp", "fixtures/allen_query_osd.csp", "--rules", "eq", "--all")
    assert code == 0
    assert sorted(out.splitlines()) == sorted([
        "R1=m- R2=b R3=o", "R1=m- R2=m R3=s", "R1=o- R2=b R3=o", "R1=o- R2=m R3=o",
    ])


def test_export_chr(capsys, tmp_path):
    rules = tmp_path / "and.rules"
    run(capsys, "gen", "--table", "and", "--out", str(rules))
    code, out, _ = run(capsys, "export", "--format", "chr", "--in", str(rules), "--naming", "appearance")
    assert code == 0
    assert "and(X,Y,1) ==> X##0,Y##0." in out.splitlines()


def test_export_rules_round_trip(capsys, tmp_path):
    rules = tmp_path / "fork.rules"
    run(capsys, "gen", "--kind", "mem", "--table", "fork", "--out", str(rules))
    _, out, _ = run(capsys, "export", "--format", "rules", "--in", str(rules))
    assert out == rules.read_text()


@pytest.mark.parametrize("name", ["and", "fork", "equiv", "nonarc", "l"])
@pytest.mark.parametrize("kind", ["eq", "mem"])
def test_oracle_rules_equals_gen(capsys, name, kind):
    _, gen, _ = run(capsys, "gen", "--kind", kind, "--table", name)
    _, oracle, _ = run(capsys, "oracle", "rules", "--kind", kind, "--table", name)
    assert gen == oracle


def test_oracle_gac(capsys):
    code, out, _ = run(capsys, "oracle", "gac", "--csp", "fixtures/nonarc.csp")
    assert code == 0
    assert out == "x in {0,1}\ny in {0,1}\n"


def test_oracle_solutions(capsys):
    _, out, _ = run(capsys, "oracle", "solutions", "--csp", "fixtures/full_adder_query.csp")
    assert all("Z=1" in l for l in out.splitlines())


def test_compose_full_adder(capsys):
    code, out, _ = run(capsys, "compose", "--csp", "fixtures/adder.csp",
                       "--interface", "i1,i2,i3,o1,o2", "--name", "full_adder")
    assert code == 0
    assert out == (corpus.data_root() / "corpus" / "full_adder.ct").read_text()


def test_bench_desk(capsys):
    code, out, err = run(capsys, "bench", "--filter", "and")
    assert code == 0
    rows = {l.split()[0]: l.split() for l in out.splitlines()[1:]}
    assert rows["and"][4:] == ["6", "6", "6", "6"]
    assert rows["and4"][4:] == ["26", "26", "43", "43"]
    assert "eq-time" in err and "eq-time" not in out


def test_bench_premise_cap_is_recorded(capsys):
    _, out, _ = run(capsys, "bench", "--filter", "fork", "--max-premise", "1")
    assert out.splitlines()[-1] == "premise cap K=1"


@pytest.mark.parametrize("argv", [
    ["gen", "--table", "nosuch"],
    ["check", "--csp", "missing.csp", "--consistency", "arc"],
    ["oracle", "rules"],
    ["solve", "--csp", "fixtures/nonarc.csp", "--rules", "eq", "some.rules"],
])
def test_usage_errors_exit_2(capsys, argv):
    code, out, err = run(capsys, *argv)
    assert code == 2
    assert out == "" and err.startswith("rulesmith ")


def test_bad_flag_exits_2(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["gen"])
    assert exc.value.code == 2


def test_parse_error_in_table_file(capsys, tmp_path):
    bad = tmp_path / "bad.ct"
    bad.write_text("constraint c\nvars x\n")
    code, _, err = run(capsys, "gen", "--table", str(bad))
    assert code == 2
    assert "bad.ct:1:" in err
