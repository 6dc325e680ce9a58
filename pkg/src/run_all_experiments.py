"""
Regenerate the CSV table and SVG figure of every experiment with its default
configuration into one output folder (cleaned first).

Usage: python3 src/run_all_experiments.py [output_dir]
"""

import logging
import shutil
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent))

from openph.cli import main as openph_main  # noqa: E402

experiments = {
    "photo": ["photo", "--freq", "1.5e15", "--threshold", "1.0e15", "--freq-max", "3e15"],
    "decay": ["decay"],
    "schrodinger_square": ["schrodinger", "--potential", "square"],
    "schrodinger_double": ["schrodinger", "--potential", "double",
                           "--barrier-height", "100", "--barrier-width", "0.1"],
    "schrodinger_parabolic": ["schrodinger", "--potential", "parabolic", "--omega", "50"],
    "circular": ["circular", "--radius", "1", "--omega", "1"],
    "oscillator": ["oscillator"],
    "oscillator_response": ["oscillator", "--mode", "response"],
    "pendulum": ["pendulum", "--theta0", "1.5707963267948966"],
    "string": ["string", "--mode", "3"],
    "temperature": ["tables", "--kind", "temperature"],
    "stirling": ["tables", "--kind", "stirling"],
}


def cleanup_folder(folder):
    """Delete everything inside `folder` (created when missing)."""
    folder = Path(folder)
    folder.mkdir(parents=True, exist_ok=True)
    deleted_count = 0
    for item in folder.iterdir():
        if item.is_dir():
            shutil.rmtree(item)
        else:
            item.unlink()
        deleted_count += 1
    logging.info(f"Deleted {deleted_count} item(s) from {folder}")


def run_all(output_dir="figures", names=None, log_file=None):
    """
    Run the default experiments, writing <name>.csv and <name>.svg for each.

    Args:
        output_dir (str or Path): Destination folder, emptied before the run
        names (list[str]): Subset of experiment names (default: all)
        log_file (str): Log file passed on to every run (default: none)

    Returns:
        list[Path]: Files written, in run order
    """
    output_dir = Path(output_dir)
    cleanup_folder(output_dir)
    written = []
    for name in names or list(experiments):
        argv = experiments[name]
        for fmt in ("csv", "svg"):
            target = output_dir / f"{name}.{fmt}"
            print(f"Running {name} ({fmt})...")
            extra = ["--log-file", str(log_file)] if log_file else []
            status = openph_main([*argv, "--format", fmt, "--output", str(target), *extra])
            if status != 0:
                raise RuntimeError(f"{name} failed with exit status {status}")
            written.append(target)
    print(f"Wrote {len(written)} files to {output_dir}")
    return written


if __name__ == "__main__":
    run_all(sys.argv[1] if len(sys.argv) > 1 else "figures", log_file="logs/run_all_experiments.log")
