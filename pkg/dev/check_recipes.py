"""
@file check_recipes.py
@Description: Runs every recipe in dev/recipes through the command line
              and reports the wall time of each. Outputs go to dev/out/.
"""
import os
import sys
from glob import glob
from time import time

current = os.path.dirname(os.path.realpath(__file__))
parent_directory = os.path.dirname(current)

sys.path.append(parent_directory)

from mg_secrecy.cli import main

TIME_LIMIT = 60.0


def test():
    out_dir = os.path.join(current, "out")
    os.makedirs(out_dir, exist_ok=True)
    failed = 0
    for recipe in sorted(glob(os.path.join(current, "recipes", "*.ini"))):
        name = os.path.splitext(os.path.basename(recipe))[0]
        t0 = time()
        code = main(["sweep", "--config", recipe, "--out", os.path.join(out_dir, name + ".csv")])
        dt = time() - t0
        status = "ok" if code == 0 and dt < TIME_LIMIT else "FAILED"
        if status != "ok":
            failed += 1
        print("{:8s} exit {}  {:6.1f} s  {}".format(name, code, dt, status))
    return failed


if __name__ == "__main__":
    sys.exit(1 if test() else 0)
