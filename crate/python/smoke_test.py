"""Smoke test for the compiled extension: import, run a small preset, read outputs back."""

import math
import sys
import tempfile
from pathlib import Path

import hallwave


def main() -> int:
    print("hallwave", hallwave.__version__)
    a = hallwave.LandauAnalytics(0.1, 0.1)
    assert math.isclose(a.magnetic_length, 1.0 / math.sqrt(2 * math.pi * 0.1), rel_tol=1e-12)
    assert math.isclose(a.hall_speed, 0.1 / (2 * math.pi * 0.1), rel_tol=1e-12)

    omegas = hallwave.spectrum(8, 8, 0.1, 0.05, bc_y="periodic")
    assert len(omegas) == 64 and omegas == sorted(omegas)

    text = hallwave.preset_text("fig7").replace("t_final = 300.0", "t_final = 130.0")
    text = text.replace('kind = "revival"', 'kind = "evolve"')
    cfg = hallwave.Config.from_toml(text)
    with tempfile.TemporaryDirectory() as d:
        manifest = hallwave.run(cfg, d, jobs=1)
        assert manifest["violations"] == [], manifest["violations"]
        names = {f["name"] for f in manifest["files"]}
        assert {"trajectory.csv", "snapshots.bin", "snapshot_times.csv"} <= names, names
        again = hallwave.load_manifest(str(Path(d) / "manifest.json"))
        assert again["run_id"] == cfg.run_id
        snaps = hallwave.read_snapshots(str(Path(d) / "snapshots.bin"))
        total = sum(map(sum, snaps.frame(len(snaps) - 1)))
        print(f"run {cfg.run_id}: {len(snaps)} frames, photon norm at last frame {total:.6f}")
        assert 0.0 < total <= 1.0 + 1e-9

    try:
        hallwave.Config.from_toml("[lattice]\nnx = 31\nny = 4\nbc_x = \"periodic\"\nalpha = 0.1\n")
    except ValueError as e:
        assert "alpha * nx" in str(e)
    else:
        raise AssertionError("gauge-inconsistent lattice accepted")
    print("ok")
    return 0


if __name__ == "__main__":
    sys.exit(main())
