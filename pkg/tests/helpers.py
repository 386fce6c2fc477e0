import json
from pathlib import Path

from mtfidelity.cli import main


def run_cli(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def write_profiles(path: Path, *entries) -> Path:
    path.write_text(json.dumps({"providers": list(entries)}), encoding="utf-8")
    return path


def tree_bytes(root: Path) -> dict[str, bytes]:
    return {str(p.relative_to(root)): p.read_bytes() for p in sorted(root.rglob("*")) if p.is_file()}
