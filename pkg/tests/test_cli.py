import io
import json
import subprocess
import sys

import pytest

from glc.cli import run
from glc.generators import GeneratorSpec, generate
from glc.prosys import system_digest, system_from_json, system_to_json


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run([str(a) for a in argv], out, err)
    return code, out.getvalue(), err.getvalue()


@pytest.fixture(scope="module")
def files(tmp_path_factory):
    root = tmp_path_factory.mktemp("systems")
    paths = {}
    for kind, depth, extra in [
        ("cbs", 5, {}),
        ("cbc", 5, {}),
        ("ladder", 5, {}),
        ("split_square", 3, {}),
        ("tangent_chain", 6, {"pattern": "101010"}),
        ("constant", 4, {}),
    ]:
        p = root / f"{kind}.json"
        p.write_text(json.dumps(system_to_json(generate(GeneratorSpec(kind, depth, **extra)))))
        paths[kind] = p
    return paths


def test_generate_writes_system(tmp_path):
    out = tmp_path / "s.json"
    code, report, _ = call("generate", "cbs", "--depth", 3, "-o", out)
    assert code == 0
    sys_ = system_from_json(json.loads(out.read_text()))
    assert json.loads(report)["system"]["digest"] == system_digest(sys_)


def test_generate_to_stdout_is_the_system():
    code, text, _ = call("generate", "random", "--depth", 2, "--seed", 5)
    assert code == 0
    assert system_from_json(json.loads(text)) == generate(GeneratorSpec("random", 2, seed=5))


def test_euler_verdicts(files):
    code, text, _ = call("euler", files["cbc"])
    assert code == 0
    code, text, _ = call("euler", files["cbs"])
    report = json.loads(text)
    assert code == 1
    assert report["verdict"]["witness"]["cut_size"] == 1


def test_euler_open_and_extras(files):
    assert call("euler", files["ladder"], "--open")[0] == 0
    assert call("euler", files["cbc"], "--chain")[0] == 0
    assert call("euler", files["cbc"], "--count")[0] == 0
    assert call("euler", files["constant"], "--probe")[0] == 0


def test_parity(files):
    code, text, _ = call("parity", files["cbs"], "--thread", "0")
    assert code == 1 and json.loads(text)["verdict"]["status"] == "NeitherCertified"
    assert call("parity", files["cbc"], "--thread", "0")[0] == 0
    code, text, _ = call("parity", files["tangent_chain"], "--thread", "z", "--strong")
    assert code == 0 and json.loads(text)["strong"]["value"] == 2


def test_regions(files):
    assert call("regions", files["cbs"])[0] == 0
    assert call("regions", files["cbs"], "--chase")[0] == 0
    code, text, _ = call("regions", files["cbs"], "--machine", "--u", "1:v0", "--m", 2)
    assert code == 0
    assert json.loads(text)["machine"]["checks"] == {"i": True, "ii": True, "iii": True}


def test_menger(files):
    code, text, _ = call("menger", files["ladder"], "--a", "0:L", "--b", "0:R")
    assert code == 0 and json.loads(text)["menger"]["k"] == 3


def test_decompose(files):
    assert call("decompose", files["cbc"], "--level", 3)[0] == 0
    assert call("decompose", files["cbs"], "--level", 1)[0] == 1


def test_embed(files, tmp_path):
    out = tmp_path / "trace.json"
    code, text, _ = call("embed", files["split_square"], "-o", out)
    assert code == 0
    assert json.loads(out.read_text())["steps"]
    code, dot, _ = call("embed", files["split_square"], "--dot", 1)
    assert code == 0 and dot.startswith("graph")


def test_export_round_trip(files, tmp_path):
    out = tmp_path / "again.json"
    code, _, _ = call("export", files["cbs"], "-o", out)
    assert code == 0
    a = system_from_json(json.loads(files["cbs"].read_text()))
    b = system_from_json(json.loads(out.read_text()))
    assert a == b and system_digest(a) == system_digest(b)
    code, dot, _ = call("export", files["cbs"], "--to", "dot", "--level", 2)
    assert code == 0 and "v00" in dot


def test_text_format(files):
    code, text, _ = call("euler", files["cbs"], "--format", "text")
    assert code == 1 and "verdict.witness.cut_size: 1" in text


def test_errors(tmp_path, files):
    bad = tmp_path / "bad.json"
    bad.write_text('{"levels": [\n  {"vertices": ]}')
    code, _, err = call("validate", bad)
    assert code == 3 and "bad.json:2:" in err
    assert call("euler", tmp_path / "missing.json")[0] == 3
    assert call("nonsense")[0] == 3
    assert call("parity", files["cbs"])[0] == 3
    assert call("menger", files["cbs"], "--a", "1:v0", "--b", "2:v00")[0] == 3


def test_invalid_system_exits_three(tmp_path, files):
    data = json.loads(files["cbs"].read_text())
    data["bonds"][0]["vertex_map"].popitem()
    p = tmp_path / "broken.json"
    p.write_text(json.dumps(data))
    code, _, err = call("euler", p)
    assert code == 3 and "error" in err
    assert call("validate", p)[0] == 1


@pytest.mark.parametrize("argv", [
    ("validate", "cbs"),
    ("euler", "cbs"),
    ("euler", "cbc", "--count"),
    ("parity", "cbs", "--thread", "0"),
    ("regions", "cbs", "--chase"),
    ("menger", "ladder", "--a", "0:L", "--b", "0:R"),
    ("decompose", "cbc", "--level", "2"),
    ("embed", "split_square"),
    ("export", "split_square"),
])
def test_repeat_runs_identical(files, argv):
    argv = [files.get(a, a) if isinstance(a, str) else a for a in argv]
    first = call(*argv)
    assert first == call(*argv)


def test_module_entry_point(files):
    res = subprocess.run([sys.executable, "-m", "glc", "euler", str(files["cbc"])], capture_output=True, text=True)
    assert res.returncode == 0 and json.loads(res.stdout)["verdict"]["status"]
