"""End-to-end checks of the nextcrop command-line tool.

Usage: check_cli.py PATH_TO_NEXTCROP
"""

import json
import re
import subprocess
import sys
import tempfile
from pathlib import Path

ERROR_LINE = re.compile(r"^error\[[a-z_]+\]: .+$")


def run(binary, *args):
    return subprocess.run([binary, *map(str, args)], capture_output=True, text=True)


def expect_error(binary, code, *args):
    proc = run(binary, *args)
    lines = proc.stderr.strip().splitlines()
    assert proc.returncode == code, (args, proc.returncode, proc.stderr)
    assert len(lines) == 1 and ERROR_LINE.match(lines[0]), (args, proc.stderr)
    return lines[0]


def expect_ok(binary, *args):
    proc = run(binary, *args)
    assert proc.returncode == 0, (args, proc.returncode, proc.stderr)
    return proc.stdout


def main(binary):
    small = ["--side", "8", "--width", "320", "--stride", "1/2", "--patch", "16"]
    with tempfile.TemporaryDirectory() as tmp:
        tmp = Path(tmp)

        defaults = expect_ok(binary, "config", "--dump-defaults")
        assert "[plan]" in defaults and 'stride = "3/4"' in defaults
        (tmp / "defaults.ini").write_text(defaults)
        assert expect_ok(binary, "--config", tmp / "defaults.ini", "config") == defaults

        expect_ok(binary, "generate", *small, "--seed", "4", "--out", tmp / "a")
        for name in ["panorama.png", "panorama.ptok", "trace.log", "codebook.pcbk", "run.ini"]:
            assert (tmp / "a" / name).is_file(), name
        expect_ok(binary, "--config", tmp / "a" / "run.ini", "generate", "--out", tmp / "b")
        for name in ["panorama.png", "panorama.ptok"]:
            assert (tmp / "a" / name).read_bytes() == (tmp / "b" / name).read_bytes(), name
        trace = (tmp / "a" / "trace.log").read_text().splitlines()
        assert len(trace) == 4 and json.loads(trace[1])["mode"] == "horizontal"

        single = expect_ok(binary, "generate", "--n", "1", "--out", tmp / "one")
        assert "512x512 px" in single

        (tmp / "one.json").write_text(
            json.dumps({"segments": [{"iterations": [1, 4], "prompt": "seascape"}]}))
        expect_ok(binary, "layout", *small, "--seed", "4", "--layout", tmp / "one.json",
                  "--out", tmp / "lay")
        assert (tmp / "lay" / "panorama.ptok").read_bytes() == (tmp / "a" / "panorama.ptok").read_bytes()

        (tmp / "two.json").write_text(json.dumps({"segments": [
            {"iterations": [1, 2], "prompt": "seascape"},
            {"iterations": [3, 4], "prompt": "grassland", "lambda": 0.65}]}))
        expect_ok(binary, "layout", *small, "--layout", tmp / "two.json", "--out", tmp / "lay2")

        expect_ok(binary, "evaluate", tmp / "a" / "panorama.png", "--side", "8", "--out", tmp / "e1")
        expect_ok(binary, "evaluate", tmp / "a" / "panorama.png", "--side", "8", "--out", tmp / "e2")
        assert (tmp / "e1" / "metrics.csv").read_text() == (tmp / "e2" / "metrics.csv").read_text()
        assert len((tmp / "e1" / "seams.csv").read_text().splitlines()) == 1 + 1

        expect_ok(binary, "ablate", "--side", "8", "--width", "384", "--seeds", "2", "--strides", "1,1/2,1/4",
                  "--out", tmp / "abl")
        rows = (tmp / "abl" / "ablation.csv").read_text().splitlines()
        assert rows[0] == "method,u,w_prime,seed,tv_mean,ssim_mean,coh,wall_ms"
        assert len(rows) == 1 + 3 * 2 + 3

        expect_ok(binary, "train-tiny", "--epochs", "3", "--codebook-size", "16", "--window", "16",
                  "--dim", "4", "--synthetic", "4", "--out", tmp / "model")
        loss = (tmp / "model" / "loss.csv").read_text().splitlines()
        assert loss[0] == "epoch,loss" and len(loss) == 1 + 4
        expect_ok(binary, "generate", "--generator", "tiny", "--checkpoint", tmp / "model" / "model.pmdl",
                  "--codebook-size", "16", "--side", "4", "--width", "128", "--stride", "1/2",
                  "--out", tmp / "tiny")

        # Error paths: one "error[...]" line and the documented exit code.
        expect_error(binary, 2, "generate", "--no-such-flag")
        expect_error(binary, 2, "generate", "--stride", "three-quarters", "--out", tmp / "x")
        expect_error(binary, 2, "generate", "--mode", "diagonal", "--out", tmp / "x")
        expect_error(binary, 2, "generate", "--generator", "tiny", "--out", tmp / "x")
        expect_error(binary, 3, "generate", "--stride", "1/3", "--out", tmp / "x")
        expect_error(binary, 3, "generate", "--width", "1024", "--out", tmp / "x")
        expect_error(binary, 3, "ablate", "--widths", "1024", "--seeds", "1", "--out", tmp / "x")
        expect_error(binary, 3, "ablate", "--side", "4", "--strides", "1/8", "--out", tmp / "x")
        (tmp / "gap.json").write_text(
            json.dumps({"segments": [{"iterations": [2, 13], "prompt": "a"}]}))
        assert "error[layout]" in expect_error(binary, 3, "layout", "--layout", tmp / "gap.json",
                                               "--out", tmp / "x")
        expect_error(binary, 5, "generate", "--config", tmp / "missing.ini")
        expect_error(binary, 5, "evaluate", tmp / "missing.png", "--out", tmp / "x")
        (tmp / "junk.png").write_bytes(b"not an image")
        assert "error[input]" in expect_error(binary, 2, "evaluate", tmp / "junk.png",
                                              "--out", tmp / "x")
        (tmp / "bad.ini").write_text("[plan]\nwidth = wide\n")
        expect_error(binary, 2, "--config", tmp / "bad.ini", "generate")
    print("cli checks passed")


if __name__ == "__main__":
    main(sys.argv[1])
