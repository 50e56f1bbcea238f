"""Channel second-order statistics: tap powers, time and frequency
correlation, and how the exponential decay rate shapes them."""

import numpy as np

from minislot.channel import (
    exponential_pdp,
    freq_correlation,
    time_correlation,
)

K = 64

for decay in (0.5, 1.0, 2.0):
    pdp = exponential_pdp(5, decay)
    print(f"decay={decay}: tap powers {np.round(pdp.taps, 4)}")

pdp = exponential_pdp(5, 1.0)

print("\nJakes time correlation rho_t(dt) at fdTs = 0.05")
for dt in range(7):
    print(f"  dt={dt}: {time_correlation(dt, 0.05):+.4f}")

print("\nfrequency correlation rho_f(dk), K = 64")
print("  dk    |rho|     arg(rho)")
for dk in (0, 1, 2, 4, 8, 16, 32):
    r = freq_correlation(dk, pdp, K)
    print(f"  {dk:2d}   {abs(r):.4f}   {np.angle(r):+.4f}")

# a flat (single tap) channel is perfectly correlated across subcarriers
flat = exponential_pdp(1, 1.0)
print("\nsingle tap: rho_f(dk) =",
      {dk: round(abs(freq_correlation(dk, flat, K)), 12) for dk in (1, 8, 31)})
