"""
Config-driven experiments
=========================

Every experiment is reproducible from a JSON config: group, realization,
symbol table (Fourier coefficients per sheet), experiment kind, and numeric
knobs.  The same configs drive the `gindex` command line tool:

    gindex validate config.json
    gindex run config.json --out results/
    gindex calibrate-sign
"""

import json
import tempfile
from pathlib import Path

from gindexlab import emit_reports, load_config, run

config = {
    "name": "z2_demo",
    "group": {"kind": "cyclic", "m": 2},
    "realization": {"kind": "reflection"},
    "symbols": {
        "e": {"plus": {"0": 2.0}, "minus": {"1": 2.0}},
        "r": {"plus": {"0": 1.0}, "minus": {"0": 1.0}},
    },
    "experiment": "full_pipeline",
    "numerics": {"windows": [48, 64, 96]},
}

with tempfile.TemporaryDirectory() as tmp:
    path = Path(tmp) / "z2.json"
    path.write_text(json.dumps(config, indent=2))

    cfg = load_config(path)
    print(f"config hash: {cfg.config_hash()[:16]} (semantic fields only)")

    record = run(cfg)
    for step, grade in record.verdicts.items():
        print(f"  {grade:9s} {step}")
    print(f"worst verdict -> exit code {record.exit_code}")

    out = Path(tmp) / "results"
    files = emit_reports(record, out)
    print("report files:", ", ".join(sorted(f.name for f in files)))

    report = json.loads((out / "report.json").read_text())
    alg = report["payloads"]["algebraic"]
    print(f"algebraic total = {alg['total_constant_term'][0]:+.4f}, "
          f"SVD index = {alg['fredholm_index']:+d}")
