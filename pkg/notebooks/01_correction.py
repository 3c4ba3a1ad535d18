"""Walk through the ALT CF3 mass estimate on a few hand-made readings.

Run: python3 notebooks/01_correction.py
"""

import numpy as np

from pmsense.correction import CorrectionParams, alt_cf3, bin_mass_coefficient
from pmsense.ingest import difference_bins

# Each size bin contributes count * (mass of one particle at the bin's
# representative diameter). Coefficients convert counts/dL to ug/m3.
for lo, hi in ((0.3, 0.5), (0.5, 1.0), (1.0, 2.5)):
    c = bin_mass_coefficient(lo, hi)
    print(f"bin {lo}-{hi} um: d={c.d_um:.4f} um, coefficient={c.coefficient:.6e}")

params = CorrectionParams()
print("\ncoefficients with cf applied later:", params.coefficients)

# Sensors report cumulative channels (>0.3, >0.5, >1.0, >2.5 um ...).
cumulative = (1200.0, 380.0, 60.0, 6.0, 1.0)
bins = difference_bins(cumulative)
print("\ncumulative", cumulative, "->", bins)
print(f"ALT CF3 = {alt_cf3(bins, params):.3f} ug/m3")

# A non-monotone reading clamps the offending bin to zero and flags it.
odd = difference_bins((100.0, 120.0, 50.0, 10.0))
print("\nnon-monotone", odd)

# Vectorised form for whole arrays of bins.
many = np.array([[800.0, 300.0, 50.0], [400.0, 100.0, 5.0]])
print("array form:", alt_cf3(many, params))
