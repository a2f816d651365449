import pathlib
import subprocess
import sys

import pytest

DEMOS = sorted(p for p in (pathlib.Path(__file__).parent.parent / "demos").glob("*.py") if not p.name.startswith("_"))


@pytest.mark.parametrize("script", DEMOS, ids=lambda p: p.stem)
def test_demo_runs(script, tmp_path):
    proc = subprocess.run([sys.executable, str(script), str(tmp_path)], capture_output=True, text=True,
                          cwd=script.parent)
    assert proc.returncode == 0, proc.stderr
    assert list(tmp_path.glob("*.csv")) and list(tmp_path.glob("*.svg"))
