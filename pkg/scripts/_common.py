import os
from pathlib import Path

from alphapart.cli import DEFAULT_OUTPUT_DIR, OUTPUT_DIR_ENV
from alphapart.serialize import atomic_write, csv_text


def out_dir() -> Path:
    return Path(os.environ.get(OUTPUT_DIR_ENV, DEFAULT_OUTPUT_DIR))


def write_csv(name: str, config: dict, header, rows) -> Path:
    path = atomic_write(out_dir() / name, csv_text(name.rsplit(".", 1)[0], config, header, rows))
    print(f"wrote {path}")
    return path
