import json

from kleinpair.cli import GOLDEN_DIR, main, pair_report, render_json


def run(capsys, *args):
    code = main(list(args))
    return code, capsys.readouterr().out


def test_group_json(capsys):
    code, out = run(capsys, "group", "C4", "--emit", "json")
    assert code == 0
    d = json.loads(out)
    assert d["mckay_type"] == "A3"
    assert len(d["character_table"]) == 4


def test_deterministic(capsys):
    _, a = run(capsys, "kleinian", "BD3", "--emit", "json")
    _, b = run(capsys, "kleinian", "BD3", "--emit", "json")
    assert a == b


def test_pair_latex(capsys):
    code, out = run(capsys, "pair", "--g1", "C2", "--g2", "BD2", "--emit", "latex")
    assert code == 0
    assert "x'" in out and "\\begin{itemize}" in out


def test_fold_and_cbh(capsys):
    code, out = run(capsys, "fold", "--g1", "BD2", "--g2", "2T", "--emit", "json")
    assert code == 0 and json.loads(out)["folded_type"] == "G2"
    code, out = run(capsys, "cbh", "--group", "C2", "--degree", "2", "--param", "t0=1/2,t1=3", "--emit", "json")
    d = json.loads(out)
    assert code == 0 and d["spherical_dims_by_degree"] == [1, 0, 3] and d["flat"]


def test_bad_input(capsys):
    assert main(["group", "X9"]) != 0
    assert main(["nonsense"]) != 0


def test_goldens():
    for g1, g2 in [("C2", "C4"), ("C2", "C6"), ("C3", "C6"), ("C4", "BD2"), ("C6", "BD3"), ("C8", "BD4"),
                   ("C10", "BD5")]:
        path = GOLDEN_DIR / f"pair_{g1}_{g2}.json"
        assert path.read_text() == render_json(pair_report(g1, g2)), path


def test_verify_suite(capsys):
    code, out = run(capsys, "verify", "--suite", "socle")
    assert code == 0 and "[PASS]" in out
