"""High-energy expansion of the amplitude and its empirical remainder orders."""

import numpy as np

from multipoint.asymptotics import leading_terms, order_probe, truncation_errors
from multipoint.direct import ProbeGeometry, ScattererSet, WavePair, manifold_points

rng = np.random.default_rng(3)
ladder = np.geomspace(1e2, 1e4, 41)
for d, expected in ((1, lambda m: -(m + 1)), (3, lambda m: -(m + 2))):
    s = ScattererSet(d, rng.uniform(-0.5, 0.5, (3, d)), [1.0, 2 - 1j, 0.5j])
    kh, lh = np.eye(d)[0], np.eye(d)[-1] if d > 1 else -np.eye(1)[0]
    family = lambda kappa: WavePair(kappa * kh, kappa * lh)  # noqa: E731
    slopes = [order_probe(s, family, ladder, m) for m in (0, 1, 2)]
    print(f"d={d}: slopes " + ", ".join(f"M={m}: {v:.3f} (want {expected(m)})" for m, v in enumerate(slopes)))

# d=2 decays in powers of 1/ln(kappa): err * (ln kappa)^(M+2) stays flat
s2 = ScattererSet(2, [[0.3, -0.2], [-0.4, 0.1]], [0.25j + 0.4, 0.25j + 0.3 * np.exp(0.5j)])
ln_ladder = np.exp(np.arange(6, 25, 2.0))
family2 = lambda kappa: manifold_points(ProbeGeometry([0.0, 0.0], kappa * kappa))  # noqa: E731
for m in (0, 1):
    scaled = truncation_errors(s2, family2, ln_ladder, m) * np.log(ln_ladder) ** (m + 2)
    print(f"d=2 M={m}: err*(ln kappa)^{m + 2} =", np.array2string(scaled, precision=3))

lt = leading_terms(s2, family2(np.exp(10)))
print("\nd=2 leading terms at p=0:", f"f21={lt.f21:.5f}", f"f22={lt.f22:.5f}")
