"""
When a special metric gains symmetry
====================================

Type IX with a diagonal frame metric. Three distinct entries give only the
homogeneity fields, two equal entries add a rotation, and the round metric
has the full six-dimensional isometry algebra.
"""

# %%
import numpy as np

from homsym.cartan import FrameMetric, connection_coefficients, curvature, curvature_class
from homsym.catalog import catalog
from homsym.killing import closure_dimension

C = catalog("IX").constants
for diag in [(1, 2, 3), (1, 1, 2), (1, 1, 3), (1, 1, 4), (1, 1, 1)]:
    h = FrameMetric.from_rows(np.diag(diag).tolist())
    d = closure_dimension(C, h).d_total
    label, k = curvature_class(curvature(connection_coefficients(C, h)))
    print(f"diag{diag}: d_total = {d}, curvature {label}" + (f" k = {k}" if k is not None else ""))
