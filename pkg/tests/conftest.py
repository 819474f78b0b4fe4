import pytest


@pytest.fixture
def write_corpus(tmp_path):
    """Write lines to a temp corpus file, return its path as str."""

    counter = {"n": 0}

    def _write(lines, name=None):
        if name is None:
            counter["n"] += 1
            name = f"corpus{counter['n']}.txt"
        path = tmp_path / name
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
        return str(path)

    return _write
