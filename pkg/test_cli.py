import io
import json
import math

import pytest

from recurrence_powers.cli import (
    EXIT_CAPPED,
    EXIT_HYPOTHESIS,
    EXIT_INPUT,
    EXIT_OK,
    EXIT_USAGE,
    EXIT_ZERO_TERM,
    main,
)
from recurrence_powers.solver import Solution


def run(*argv):
    out = io.StringIO()
    code = main(list(argv), stream=out)
    records = [json.loads(line) for line in out.getvalue().splitlines() if line]
    return code, records


def of_kind(records, kind):
    return [r for r in records if r["kind"] == kind]


def test_bound_command():
    print("\nTesting `bound --seq fibonacci --x 2`...")
    code, records = run("bound", "--seq", "fibonacci", "--x", "2")
    assert code == EXIT_OK
    assert all(r["schema"] == "v1" for r in records)
    header = of_kind(records, "bound")[0]
    assert header["n0"] == 3 and int(header["N"]) >= 3
    c0 = next(r for r in of_kind(records, "trace_step") if r["name"] == "c0")
    assert c0["lo"].startswith("0.8944") and c0["hi"].startswith("0.8944")
    print("✅ N =", header["N"])


def test_bound_rejects_degenerate_and_unparsable_seeds():
    assert run("bound", "--seq", "1,1,0,0", "--x", "2")[0] == EXIT_HYPOTHESIS
    assert run("bound", "--seq", "1,1,x,1", "--x", "2")[0] == EXIT_INPUT
    assert run("bound", "--seq", "nosuchpreset", "--x", "2")[0] == EXIT_INPUT
    assert run("bound", "--seq", "pell", "--x", "1")[0] == EXIT_INPUT
    assert run("check", "--seq", "pell", "--log-level", "foo")[0] == EXIT_INPUT


def test_bound_refines_with_precision():
    _, coarse = run("bound", "--seq", "pell", "--x", "10")
    _, fine = run("bound", "--seq", "pell", "--x", "10", "--precision", "256")
    assert int(of_kind(fine, "bound")[0]["N"]) <= int(of_kind(coarse, "bound")[0]["N"])


def test_solve_command_is_capped():
    code, records = run("solve", "--seq", "fibonacci", "--x", "2", "--n-cap", "50")
    assert code == EXIT_CAPPED
    header = of_kind(records, "solution_set")[0]
    assert header["certified_complete"] is False and header["count"] == 7
    code, records = run("solve", "--seq", "lucas", "--x", "3", "--n-cap", "50")
    assert code == EXIT_CAPPED
    assert {"n": 4, "m": 0, "x": 3, "q": 2} in [
        {k: r[k] for k in ("n", "m", "x", "q")} for r in of_kind(records, "solution")
    ]
    code, records = run("solve", "--seq", "fibonacci", "--x", "2", "--n-cap", "0")
    assert code == EXIT_CAPPED and of_kind(records, "solution") == []


def test_search_command_round_trips():
    code, records = run("search", "--seq", "fibonacci", "--n-cap", "3")
    assert code == EXIT_OK
    solutions = of_kind(records, "solution")
    assert [(r["n"], r["m"], r["x"], r["q"], r["value"]) for r in solutions] == [(3, 3, 2, 2, "4")]
    for r in of_kind(run("search", "--seq", "pell", "--n-cap", "30")[1], "solution"):
        payload = {k: v for k, v in r.items() if k not in ("schema", "kind")}
        assert Solution.model_validate(payload).model_dump(mode="json") == payload


def test_abc_commands():
    print("\nTesting `abc --seq fibonacci --n 3 --m 1`...")
    code, records = run("abc", "--seq", "fibonacci", "--n", "3", "--m", "1")
    assert code == EXIT_OK
    t = of_kind(records, "abc_triple")[0]
    assert (t["A"], t["B"], t["C"], t["rad"]) == ("-4", "9", "5", "30")
    assert abs(t["quality"] - math.log(9) / math.log(30)) < 1e-12
    assert run("abc", "--seq", "fibonacci", "--n", "0", "--m", "0")[0] == EXIT_ZERO_TERM
    code, records = run("abc-scan", "--seq", "fibonacci", "--n-cap", "10", "--top", "3")
    assert code == EXIT_OK
    assert of_kind(records, "quality_report")[0]["scanned"] == 66
    assert len(of_kind(records, "abc_triple")) == 3
    print("✅ triple", t)


def test_family_command():
    code, records = run("family", "--p", "1", "--q", "1", "--k-max", "2")
    assert code == EXIT_OK
    assert [(r["n"], r["m"], r["x"], r["q"]) for r in of_kind(records, "solution")] == [(4, 0, 3, 2), (8, 0, 7, 2)]
    assert all(r["status"] == "fails" for r in of_kind(records, "condition_17"))
    code, records = run("family", "--p", "2", "--q", "1", "--k-max", "1")
    assert of_kind(records, "solution")[0]["value"] == "36"
    assert run("family", "--p", "1", "--q", "-1", "--k-max", "1")[0] == EXIT_HYPOTHESIS


def test_check_command():
    code, records = run("check", "--seq", "fibonacci")
    assert code == EXIT_OK and of_kind(records, "validation")[0]["passed"] is True
    code, records = run("check", "--seq", "0,2,1,1")
    assert code == EXIT_HYPOTHESIS
    failed = [r["name"] for r in of_kind(records, "check") if not r["passed"]]
    assert "pq_nonzero" in failed


def test_lower_command():
    code, records = run("lower", "--seq", "fibonacci", "--n-min", "5", "--n-max", "40")
    assert code == EXIT_OK
    rigorous = of_kind(records, "lower_bound_constants")[0]
    assert rigorous["d4"]["lo"].startswith("0.2236")
    assert of_kind(records, "empirical_lower_constants")[0]["non_rigorous"] is True


def test_csv_and_pretty_output():
    out = io.StringIO()
    assert main(["search", "--seq", "fibonacci", "--n-cap", "7", "--output", "csv"], stream=out) == EXIT_OK
    lines = out.getvalue().splitlines()
    assert "n,m,x,q,value,certified_complete" in lines
    out = io.StringIO()
    assert main(["check", "--seq", "pell", "--output", "pretty"], stream=out) == EXIT_OK
    assert "== validation" in out.getvalue()


def test_unknown_flag_exits_64():
    with pytest.raises(SystemExit) as info:
        main(["solve", "--x", "2", "--frobnicate"])
    assert info.value.code == EXIT_USAGE
    with pytest.raises(SystemExit) as info:
        main([])
    assert info.value.code == EXIT_USAGE


if __name__ == "__main__":
    print("Testing the command line...")
    print("=" * 80)
    test_bound_command()
    test_bound_rejects_degenerate_and_unparsable_seeds()
    test_bound_refines_with_precision()
    test_solve_command_is_capped()
    test_search_command_round_trips()
    test_abc_commands()
    test_family_command()
    test_check_command()
    test_lower_command()
    test_csv_and_pretty_output()
    print("\nTests completed!")
