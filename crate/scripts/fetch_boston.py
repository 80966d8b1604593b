#!/usr/bin/env python3
"""Fetch the Boston housing data (the `Boston` table from R's MASS package)
into data/boston.csv for the application workflow and the data-gated tests.

The dataset is not bundled with this repository; this script documents the
public sources and materializes the CSV from whichever is available:

  1. the `pydataset` Python package (bundles the R datasets, including
     MASS::Boston):  pip install pydataset
  2. R with the MASS package:
       Rscript -e 'write.csv(MASS::Boston, "data/boston.csv")'
  3. the original StatLib archive (harrison & rubinfeld housing data):
       http://lib.stat.cmu.edu/datasets/boston

The expected header is the MASS column set: crim, zn, indus, chas, nox, rm,
age, dis, rad, tax, ptratio, black, lstat, medv (a leading unnamed row-name
column is fine). 506 data rows.
"""

import os
import sys

OUT = os.path.join(os.path.dirname(__file__), "..", "data", "boston.csv")


def from_pydataset() -> bool:
    try:
        from pydataset import data
    except ImportError:
        return False
    frame = data("Boston")
    os.makedirs(os.path.dirname(OUT), exist_ok=True)
    frame.to_csv(OUT, index=False)
    return True


def main() -> int:
    if os.path.exists(OUT):
        print(f"already present: {OUT}")
        return 0
    if from_pydataset():
        print(f"wrote {OUT} via pydataset")
        return 0
    sys.stderr.write(
        "pydataset is not installed; install it (pip install pydataset) or use R:\n"
        "  Rscript -e 'write.csv(MASS::Boston, \"data/boston.csv\")'\n"
    )
    return 1


if __name__ == "__main__":
    raise SystemExit(main())
