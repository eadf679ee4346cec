"""
Bringing your own data
======================

Data tables and covariance matrices are read from CSV. A non-numeric
first row is taken as variable names. Everything below is also available
from the ``lsspca`` command.
"""

import os
import tempfile

import numpy as np

from lsspca import SearchConfig, read_data_csv, read_matrix_csv, sequential_fit, summarize, write_matrix_csv
from lsspca.cli import main

rng = np.random.default_rng(3)
n = 200
size = rng.standard_normal(n)
shape = rng.standard_normal(n)
X = np.column_stack([
    size + 0.3 * rng.standard_normal(n),
    size + 0.3 * rng.standard_normal(n),
    size + shape + 0.3 * rng.standard_normal(n),
    shape + 0.3 * rng.standard_normal(n),
    shape + 0.3 * rng.standard_normal(n),
    rng.standard_normal(n),
])
names = ["height", "weight", "reach", "width", "depth", "noise"]

tmp = tempfile.mkdtemp()
data_path = os.path.join(tmp, "measures.csv")
with open(data_path, "w") as fh:
    fh.write(",".join(names) + "\n")
    for row in X:
        fh.write(",".join(repr(float(v)) for v in row) + "\n")

# Standardized data give the correlation matrix.
R = read_data_csv(data_path)
comps = sequential_fit(R, SearchConfig((2, 2), "uncorrelated"))
print(summarize(comps).to_text())
for c in comps:
    print([R.names[i] for i in c.support])

# Matrices round-trip through CSV exactly.
matrix_path = os.path.join(tmp, "corr.csv")
write_matrix_csv(matrix_path, R)
assert np.array_equal(read_matrix_csv(matrix_path).values, R.values)

# The command line, with CSV outputs written next to the input.
status = main(["bb", "--input", matrix_path, "--cards", "2,2",
               "--summary-csv", os.path.join(tmp, "summary.csv")])
print("exit status", status)
status = main(["bb", "--input", matrix_path, "--cards", "2,1"])
print("exit status", status, "(the second uncorrelated component needs two loadings)")
