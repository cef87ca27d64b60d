import os
import sys
from pathlib import Path

import pytest
from hypothesis import settings

# Run against the source tree without installing
PROJECT_ROOT = Path(__file__).resolve().parent
SRC_DIR = PROJECT_ROOT / "src"
if SRC_DIR.exists() and str(SRC_DIR) not in sys.path:
    sys.path.insert(0, str(SRC_DIR))

# Jet evaluation is slow; no per-example deadline
settings.register_profile("lightlike", deadline=None, max_examples=60)
settings.load_profile("lightlike")


@pytest.fixture(autouse=True)
def _no_user_settings(monkeypatch: pytest.MonkeyPatch, tmp_path_factory: pytest.TempPathFactory) -> None:
    """Keep a developer's own settings.ini and LIGHTLIKE_* variables out of tests."""
    monkeypatch.setenv("XDG_CONFIG_HOME", str(tmp_path_factory.mktemp("xdg")))
    for name in [n for n in list(os.environ) if n.startswith("LIGHTLIKE_")]:
        monkeypatch.delenv(name)
