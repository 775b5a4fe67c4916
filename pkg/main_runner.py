"""Executable wrapper so users can run `python main_runner.py <subcommand> ...`.
This avoids relative import issues when not invoking as a package.

`python main_runner.py --config config.yaml` runs that file as a pipeline.
"""
import os, sys

HERE = os.path.dirname(os.path.abspath(__file__))
if HERE not in sys.path:
    sys.path.insert(0, HERE)

from src.main import run  # type: ignore

def main():
    argv = sys.argv[1:]
    if len(argv) >= 2 and argv[0] == '--config':
        argv = ['pipeline', argv[1]] + argv[2:]
    sys.exit(run(argv))

if __name__ == '__main__':
    main()
