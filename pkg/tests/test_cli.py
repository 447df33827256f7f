import hashlib
import json
import re
from fractions import Fraction

import pytest

from crown.cli import run
from crown.gen import GadgetSpec, gadget_layout, gen_gadget, gen_random
from crown.model import Instance, make_report, read_layout, write_instance, write_layout
from crown.solvers import ALGORITHMS, SOLVERS
from crown.svg import InvalidReport, render_svg


def dump(path, text):
    path.write_text(text)
    return str(path)


TWO_BOXES = Instance.build([("a", 1, 1), ("b", 2, 1)], [("a", "b", 4)])


def test_solve_exact_two_boxes(tmp_path, capsys):
    inst = dump(tmp_path / "i.json", write_instance(TWO_BOXES))
    assert run(["solve", inst, "--algo", "exact"]) == 0
    rep = read_layout(capsys.readouterr().out)
    assert rep.profit == 4 and rep.certified_ratio == "exact"


def test_eval_names_overlapping_pair(tmp_path, capsys):
    inst = dump(tmp_path / "i.json", write_instance(TWO_BOXES))
    bad = {"placements": [{"id": "a", "x": "0", "y": "0"}, {"id": "b", "x": "1/2", "y": "0"}]}
    lay = dump(tmp_path / "l.json", json.dumps(bad))
    assert run(["eval", inst, lay]) == 2
    err = capsys.readouterr().err
    assert "'a'" in err and "'b'" in err and "overlap" in err


def test_usage_errors_exit_one(tmp_path, capsys):
    assert run([]) == 1
    assert run(["solve", str(tmp_path / "missing.json")]) == 1
    inst = dump(tmp_path / "i.json", write_instance(TWO_BOXES))
    assert run(["solve", inst, "--algo", "nope"]) == 1
    assert run(["solve", inst, "--eps", "0"]) == 1
    assert run(["solve", dump(tmp_path / "bad.json", "{")]) == 1
    capsys.readouterr()


def test_budget_exceeded_exits_three(tmp_path, capsys):
    k6 = Instance.build([(v, 1, 1) for v in "abcdef"], [(u, v) for u in "abcdef" for v in "abcdef" if u < v])
    inst = dump(tmp_path / "k6.json", write_instance(k6))
    out = tmp_path / "r.json"
    assert run(["solve", inst, "--algo", "exact", "--exact-budget", "20", "--out", str(out)]) == 3
    assert read_layout(out.read_text()).certified_ratio == "incumbent"
    capsys.readouterr()


def test_gen_and_round_trip(tmp_path, capsys):
    out = tmp_path / "g.json"
    assert run(["gen", "planar-triangulation", "-n", "9", "--seed", "4", "--out", str(out)]) == 0
    rep = tmp_path / "r.json"
    svg = tmp_path / "r.svg"
    assert run(["solve", str(out), "--out", str(rep), "--svg", str(svg)]) == 0
    assert run(["eval", str(out), str(rep)]) == 0
    assert svg.read_text().startswith("<svg")
    assert run(["gen", "gadget", "-n", "2", "--out", str(tmp_path / "gd.json"),
                "--layout-out", str(tmp_path / "gl.json")]) == 0
    assert run(["eval", str(tmp_path / "gd.json"), str(tmp_path / "gl.json")]) == 0
    assert "profit 48/1" in capsys.readouterr().out


def test_gen_text(tmp_path, capsys):
    f = dump(tmp_path / "f.txt", "alpha 3\nbeta 1\n")
    c = dump(tmp_path / "c.txt", "alpha beta 2\n")
    assert run(["gen", "text", "--freq", f, "--cooc", c]) == 0
    assert '"p": "2/1"' in capsys.readouterr().out
    assert run(["gen", "text"]) == 1


@pytest.mark.parametrize("algo", sorted(SOLVERS))
def test_eval_of_solve_is_clean(tmp_path, capsys, algo):
    for cls in ("path", "tree", "outerplanar", "planar-triangulation", "bipartite", "general"):
        inst = gen_random(cls, 4, dim_range=(1, 5), seed=2)
        ipath = dump(tmp_path / f"{cls}.json", write_instance(inst))
        rpath = tmp_path / f"{cls}.{algo}.json"
        code = run(["solve", ipath, "--algo", algo, "--out", str(rpath)])
        if code == 1:
            continue  # class mismatch
        assert code == 0
        assert run(["eval", ipath, str(rpath)]) == 0
    capsys.readouterr()


def test_bench_ratios_respect_certificates(tmp_path, capsys, monkeypatch):
    d = tmp_path / "corpus"
    d.mkdir()
    for seed in range(50):
        dump(d / f"g{seed:02d}.json", write_instance(gen_random("general", 3, dim_range=(1, 6), seed=seed)))
    monkeypatch.setenv("CROWN_THREADS", "4")
    assert run(["bench", str(d), "--algos", "auto,general-det,general-rand,bipartite"]) == 0
    captured = capsys.readouterr()
    rows = [line.split("\t") for line in captured.out.splitlines()[1:]]
    checked = [r for r in rows if r[8] in ("yes", "NO")]
    assert len(checked) >= 100 and all(r[8] == "yes" for r in checked)
    for r in checked:
        frac, cert = Fraction(r[7]), r[6]
        if cert != "exact":
            assert frac >= 1 / Fraction(cert)
    assert "default seed" in captured.err


def test_bench_is_deterministic(tmp_path, capsys):
    d = tmp_path / "corpus"
    d.mkdir()
    for seed in range(6):
        dump(d / f"t{seed}.json", write_instance(gen_random("tree", 6, seed=seed)))
    outs = []
    for k in range(2):
        rep_dir = tmp_path / f"reports{k}"
        assert run(["bench", str(d), "--seed", "5", "--reports", str(rep_dir), "--out", str(tmp_path / f"t{k}.tsv")]) == 0
        outs.append({p.name: p.read_bytes() for p in rep_dir.iterdir()})
    assert outs[0] == outs[1] and any(name.endswith(".svg") for name in outs[0])
    assert (tmp_path / "t0.tsv").read_bytes() == (tmp_path / "t1.tsv").read_bytes()
    capsys.readouterr()


def test_algorithm_flag_lists_every_solver():
    assert set(SOLVERS) | {"auto"} == set(ALGORITHMS)


# --- svg ------------------------------------------------------------------------------------

def test_svg_single_box():
    inst = Instance.build([("a", 2, 1)], [])
    svg = render_svg(inst, make_report(inst, {"a": (0, 0)}, "exact", "x"))
    assert svg.count("<rect") == 1 and 'viewBox="0 0 4 3"' in svg


def test_svg_touching_pair_has_one_mark():
    inst = Instance.build([("a", 1, 1), ("b", 1, 1)], [("a", "b")])
    svg = render_svg(inst, make_report(inst, {"a": (0, 0), "b": (1, Fraction(1, 2))}, "exact", "x"))
    assert svg.count("<rect") == 2 and svg.count("<line") + svg.count("<circle") == 1
    # half-unit offsets are scaled away
    assert not re.search(r'="[^"]*[./][^"]*"', svg.split("\n", 1)[1].replace("http://www.w3.org/2000/svg", ""))


def test_svg_rejects_invalid_report():
    inst = Instance.build([("a", 1, 1), ("b", 1, 1)], [])
    rep = make_report(inst, {"a": (0, 0), "b": (3, 0)}, "exact", "x")
    bad = type(rep)({"a": (0, 0), "b": (Fraction(1, 2), 0)}, (), 0, "exact", "x")
    with pytest.raises(InvalidReport):
        render_svg(inst, bad)


def test_gadget_rendering_is_stable():
    spec = GadgetSpec(1, ((0, 0, 0),))
    inst = gen_gadget(spec)
    rep = make_report(inst, gadget_layout(spec, [0]), "exact", "gadget")
    svg = render_svg(inst, rep)
    assert svg.count("<rect") == 12
    assert svg.count("<line") == 10  # petal 1 is parked, so 7 petals and 3 elements touch
    assert svg == render_svg(inst, read_layout(write_layout(rep)))
    digest = hashlib.sha256(svg.encode()).hexdigest()
    assert digest == hashlib.sha256(render_svg(inst, rep).encode()).hexdigest()
