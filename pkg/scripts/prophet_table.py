#!/usr/bin/env python3
"""Worst prophet ratio against the squared coefficient of variation.

Columns: cv2, exact ratio z, best explicit log bound, its tangent slope beta,
and the product bound * log(cv2), which should level off for large cv2.
"""

import math

from robust_stopping.prophet import solve_worst_ratio

if __name__ == "__main__":
    print(f"{'cv2':>12} {'z':>10} {'explicit':>10} {'beta':>8} {'bound*log':>10}")
    for cv2 in [0.0, 0.1, 0.5, 1.0, 3.0, 10.0] + [math.exp(j) for j in (4, 6, 8, 10, 15, 20)]:
        s = solve_worst_ratio(1.0, cv2)
        prod = s.explicit_bound * math.log(cv2) if cv2 > 1 else float("nan")
        print(f"{cv2:>12.4g} {s.z:>10.6f} {s.explicit_bound:>10.6f} {s.beta_used:>8.4f} {prod:>10.4f}")
