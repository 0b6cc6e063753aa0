"""Drive the ``verify`` command on the bundled configs and read back the reports.

Equivalent shell usage:
    verify --config demos/configs/square_x.json --out out/square_x

Run: python demos/06_cli_report.py
"""
import json
import tempfile
from pathlib import Path

from robinsym.cli import main

configs = Path(__file__).parent / "configs"

with tempfile.TemporaryDirectory() as tmp:
    for cfg in sorted(configs.glob("*.json")):
        out = Path(tmp) / cfg.stem
        print(f"\n$ verify --config {cfg.name} --out {out.name}")
        code = main(["--config", str(cfg), "--out", str(out)])
        print(f"exit code {code}")

        report = json.loads((out / "report.json").read_text())
        print(f"report.json: schema {report['schema']}, suites {list(report['suites'])}, "
              f"overall {report['overall']}")
        print("profiles:", sorted(p.name for p in (out / "profiles").glob("*.csv")))
        print("solutions:", sorted(p.name for p in (out / "solutions").glob("*.csv")))

    # A coarser grid through the override flag; verdict slack scales with h.
    print("\n$ verify --config square_x.json --h 0.03125")
    main(["--config", str(configs / "square_x.json"), "--out", str(Path(tmp) / "coarse"), "--h", "0.03125"])
