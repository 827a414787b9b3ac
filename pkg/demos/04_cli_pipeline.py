"""The whole pipeline through the command-line interface.

Runs synth -> clean -> stats -> align -> query/trace/report in a scratch
directory, exactly as you would against real per-decade files, and prints
each command with its output.
"""
import subprocess
import sys
import tempfile
from pathlib import Path

EPOCHS = 5
YEARS = [1800 + 10 * t for t in range(EPOCHS)]
CHAIN = [f"w{10 + t}" for t in range(EPOCHS - 1)] + ["w0"]


def run(*args, stdin=None):
    cmd = [sys.executable, "-m", "diachron", *args]
    print(f"\n$ diachron {' '.join(args)}")
    result = subprocess.run(cmd, capture_output=True, text=True, input=stdin)
    if result.stdout:
        print(result.stdout, end="")
    if result.stderr:
        print(result.stderr, end="", file=sys.stderr)
    if result.returncode != 0:
        raise SystemExit(f"command failed with exit code {result.returncode}")
    return result.stdout


with tempfile.TemporaryDirectory() as tmp:
    tmp = Path(tmp)
    plan = tmp / "plan.cfg"
    plan.write_text(
        "seed=99\nepochs=5\nvocab_size=80\ndim=12\nnoise_sigma=0.05\n"
        f"analogue.w0={','.join(CHAIN)}\n"
    )
    print(f"plan file:\n{plan.read_text()}")

    run("synth", "--plan", str(plan), "--out", str(tmp / "series"))

    clean = tmp / "clean"
    clean.mkdir()
    for year in YEARS:
        run(
            "clean",
            "--in", str(tmp / "series" / f"{year}.dwe"),
            "--epoch", str(year),
            "--out", str(clean / f"{year}.dwe"),
        )
    (clean / "manifest.tsv").write_text(
        "".join(f"{y}\t{y}.dwe\n" for y in YEARS)
    )

    run("stats", "--manifest", str(clean / "manifest.tsv"))
    run(
        "align",
        "--manifest", str(clean / "manifest.tsv"),
        "--target", str(YEARS[-1]),
        "--out", str(tmp / "aligned"),
    )
    run("query", "--aligned", str(tmp / "aligned"), "--word", "w0",
        "--epoch", "1800", "--top", "3")
    trace = run("trace", "--aligned", str(tmp / "aligned"), "--word", "w0",
                "--top", "1", "--format", "csv")
    run("report", "--aligned", str(tmp / "aligned"),
        "--word", "w0", "--word", "w1", "--format", "md")
    run("repl", "--aligned", str(tmp / "aligned"), stdin="n 3\nq w0 1800\nquit\n")

    got = [line.split(",")[1] for line in trace.splitlines()[1:]]
    print(f"\nplanted chain:   {CHAIN}")
    print(f"traced top-1:    {got}")
    print(f"pipeline reproduces the planted table: {got == CHAIN}")
