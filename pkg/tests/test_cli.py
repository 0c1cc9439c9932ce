import io
import shutil
import subprocess
import sys

import pytest

from semrep import data
from semrep.cli import run
from semrep.xmlio import loads

GOLDEN = str(data.path("golden.xml"))
EXCERPT = str(data.path("uncorrected_excerpt.xml"))
DEFAULT_REG = str(data.path("default.reg"))


def cli(*argv, stdin=""):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), io.StringIO(stdin), out, err)
    return code, out.getvalue(), err.getvalue()


def test_validate_golden():
    code, out, _ = cli("validate", "--registry", DEFAULT_REG, GOLDEN)
    assert code == 0 and out == "valid: 0 errors, 0 warnings\n"


def test_readings_golden():
    code, out, _ = cli("readings", GOLDEN)
    assert code == 0 and out.splitlines() == ["0.8 Order", "0.3 Inform"]


def test_best_golden(tmp_path):
    target = tmp_path / "best.xml"
    code, out, _ = cli("best", GOLDEN, "-o", str(target))
    assert code == 0 and out == "0.8 Order\n"
    reading = loads(target.read_bytes())
    assert reading.is_ground() and len(reading.nodes) == 6


def test_stats_golden():
    code, out, _ = cli("stats", GOLDEN)
    stats = dict(line.split(": ") for line in out.splitlines())
    assert code == 0
    assert (stats["events"], stats["participants"], stats["relations"], stats["groups"],
            stats["alternatives"], stats["readings"]) == ("2", "4", "3", "1", "2", "2")


def test_merge_contradictory(fixture_path):
    code, out, _ = cli("merge", str(fixture_path("speech.xml")),
                       str(fixture_path("prosody_contradictory.xml")), "--corr", "e0=e0")
    assert code == 1
    assert out.startswith("conflict: e0 dialAct") and "[empty-intersection]" in out


def test_merge_ok(fixture_path):
    code, out, _ = cli("merge", str(fixture_path("speech.xml")),
                       str(fixture_path("prosody.xml")), "--corr", "e0=e0")
    assert code == 0
    (group,) = loads(out).alt_groups
    assert [a.cert for a in group.alternatives] == [0.8 * 0.5]


def test_merge_corr_file(fixture_path):
    code, out, _ = cli("merge", str(fixture_path("speech.xml")), str(fixture_path("gesture.xml")),
                       "--corr-file", str(fixture_path("corr.txt")))
    assert code == 0 and "pointer_agent" not in out


def test_canon_idempotent(tmp_path):
    _, first, _ = cli("canon", GOLDEN)
    path = tmp_path / "c.xml"
    path.write_text(first, encoding="utf-8")
    _, second, _ = cli("canon", str(path))
    assert first == second


def test_canon_stdin(golden_text):
    code, out, _ = cli("canon", "-", stdin=golden_text)
    assert code == 0 and cli("canon", GOLDEN)[1] == out


@pytest.mark.parametrize("argv", [
    ("readings", GOLDEN),
    ("canon", GOLDEN),
    ("stats", GOLDEN),
    ("validate", GOLDEN),
])
def test_byte_determinism(argv):
    assert cli(*argv) == cli(*argv)


def test_prune_and_bind(tmp_path):
    code, out, _ = cli("prune", GOLDEN, "--group", "a1", "--keep", "1")
    assert code == 0 and [a.cert for a in loads(out).alt_groups[0].alternatives] == [0.3]
    doc = loads(out)
    src = tmp_path / "v.xml"
    src.write_text(out.replace("</semRep>", '  <var id="v1" domain="y z"/>\n'
                               '  <relation source="v1" target="e1"><role>theme</role>'
                               "</relation>\n</semRep>"), encoding="utf-8")
    code, out, _ = cli("bind", str(src), "--var", "v1", "--node", "z")
    bound = loads(out)
    assert code == 0 and not bound.variables and len(bound.relations) == len(doc.relations) + 1


def test_map(fixture_path):
    code, out, _ = cli("map", GOLDEN, "--mapping", str(fixture_path("mapping.txt")))
    assert code == 0 and "<speechAct>Directive</speechAct>" in out


def test_regdiff(tmp_path):
    code, out, _ = cli("regdiff", DEFAULT_REG, DEFAULT_REG)
    assert code == 0 and out == ""
    other = tmp_path / "other.reg"
    other.write_text(data.path("default.reg").read_text().replace(
        "</registry>", '  <category name="colour" type="text"/>\n</registry>'))
    assert cli("regdiff", DEFAULT_REG, str(other))[1] == "only-in-b: colour\n"


def test_assimilate_session(tmp_path, fixture_path):
    session = tmp_path / "session"
    code, out, _ = cli("assimilate", "--session", str(session), str(fixture_path("speech.xml")))
    assert code == 0 and out == "assimilated speech at 1000\n"
    code, out, _ = cli("assimilate", "--session", str(session), "--corr", "x=pointer_agent",
                       str(fixture_path("gesture.xml")))
    assert code == 0
    current = loads((session / "current.xml").read_bytes())
    assert current.stats()["nodes"] == 5
    before = (session / "current.xml").read_bytes()
    code, out, _ = cli("assimilate", "--session", str(session), "--corr", "e1=e1",
                       "--registry", DEFAULT_REG, str(fixture_path("tense_past.xml")))
    assert code == 1 and "tense" in out
    assert (session / "current.xml").read_bytes() == before
    log = (session / "history.log").read_text().splitlines()
    assert [line.split("\t")[::2] for line in log] == \
        [["speech", "ok"], ["gesture", "ok"], ["past", "conflict"]]


def test_profile(tmp_path):
    profile = tmp_path / "p.json"
    profile.write_text('{"event": "ev", "participant": "part"}')
    code, out, _ = cli("canon", "--profile", str(profile), GOLDEN)
    # golden uses the default vocabulary, which this profile does not know
    assert code == 2
    code, out, _ = cli("canon", GOLDEN)
    src = tmp_path / "g.xml"
    src.write_text(out.replace("<event", "<ev").replace("</event", "</ev")
                   .replace("<participant", "<part").replace("</participant", "</part"))
    code, out2, _ = cli("canon", "--profile", str(profile), str(src))
    assert code == 0 and out2 == src.read_text()


class TestExitCodes:
    def test_unknown_subcommand(self):
        assert cli("frobnicate")[0] == 2

    def test_unknown_flag(self):
        assert cli("readings", "--wat", GOLDEN)[0] == 2

    def test_missing_file(self):
        code, _, err = cli("canon", "/nonexistent/doc.xml")
        assert code == 2 and "cannot read" in err

    def test_malformed_markup(self):
        code, out, err = cli("canon", EXCERPT)
        assert code == 2 and out == "" and "fatal" in err

    def test_invalid_document(self, tmp_path):
        path = tmp_path / "bad.xml"
        path.write_text('<semRep id="d"><event id="e"><tense>someday</tense></event></semRep>')
        code, out, _ = cli("validate", str(path))
        assert code == 1 and out.splitlines()[-1] == "invalid: 1 errors, 0 warnings"

    def test_strict(self, tmp_path):
        path = tmp_path / "odd.xml"
        path.write_text('<semRep id="d"><event id="e"><colour>red</colour></event></semRep>')
        assert cli("validate", str(path))[0] == 0
        assert cli("validate", "--strict", str(path))[0] == 1

    def test_bad_registry(self, fixture_path):
        assert cli("validate", "--registry", str(fixture_path("bad_registry.reg")), GOLDEN)[0] == 2

    def test_operation_error(self):
        code, _, err = cli("prune", GOLDEN, "--group", "a1", "--keep", "5")
        assert code == 2 and "IndexOutOfRange" in err

    def test_cap(self):
        code, out, err = cli("readings", "--cap", "1", GOLDEN)
        assert code == 0 and out == "0.8 Order\n" and "truncated" in err
        assert cli("best", "--cap", "1", GOLDEN)[0] == 2

    def test_help(self):
        code, out, _ = cli("--help")
        assert code == 0 and "validate" in out


@pytest.mark.skipif(shutil.which("semrep") is None, reason="console script not installed")
def test_console_script():
    proc = subprocess.run(["semrep", "readings", GOLDEN], capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout == "0.8 Order\n0.3 Inform\n"


def test_module_entry():
    proc = subprocess.run([sys.executable, "-m", "semrep.cli", "best", GOLDEN],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout == "0.8 Order\n"
