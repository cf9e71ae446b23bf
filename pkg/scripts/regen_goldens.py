"""Regenerate the golden files under tests/golden.

Each expected file holds the exit code on its first line and the JSON report
on the second.  The stabilisation corpus file pins the least k per instance.
Review the diff before committing regenerated goldens.
"""
import io
import json
from pathlib import Path

import sys

from surgerykit.cli import run
from surgerykit.lmonoid import stabilize_until_elementary

ROOT = Path(__file__).resolve().parent.parent / "tests" / "golden"
sys.path.insert(0, str(ROOT.parent))

from generators import stabilization_corpus  # noqa: E402


def render(case: dict) -> str:
    out = io.StringIO()
    inputs = [str(ROOT / "inputs" / name) for name in case["inputs"]]
    code = run([case["command"], *inputs, *case.get("args", [])], out=out)
    report = out.getvalue().replace(str(ROOT / "inputs") + "/", "")
    return f"{code}\n{report}"


def main() -> None:
    cases = json.loads((ROOT / "cases.json").read_text())
    for case in cases:
        (ROOT / "expected" / f"{case['name']}.txt").write_text(render(case))
        print(case["name"])
    corpus = []
    for x in stabilization_corpus(seed=7, size=50):
        r = stabilize_until_elementary(x, 3)
        corpus.append({"k": r.k, "kind": r.certificate.kind if r.certificate else None})
    (ROOT / "stabilization_corpus.json").write_text(json.dumps(corpus, indent=1) + "\n")
    print("stabilization_corpus")


if __name__ == "__main__":
    main()
