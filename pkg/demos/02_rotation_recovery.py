"""Recovering a planted rotation between two embedding spaces.

Two synthetic epochs differ by a known random rotation plus noise.  The
orthogonal least-squares fit should recover that rotation; we audit how close
it gets, that it stays orthogonal, and how recovery degrades with noise.
"""
import numpy as np

from diachron import (
    Epoch,
    SynthPlan,
    align_series,
    gen_series,
    orthogonality_defect,
    random_orthogonal,
    svd,
)
from diachron.synth import _ROT_STREAM_BASE

DIM = 40

for sigma in (0.0, 0.01, 0.1):
    plan = SynthPlan(seed=314, epochs=2, vocab_size=500, dim=DIM, noise_sigma=sigma)
    series = gen_series(plan)

    aligned = align_series(series, plan.reference_epoch)
    recovered = aligned.rotation(Epoch(1800)).q
    planted = random_orthogonal(314, DIM, stream=_ROT_STREAM_BASE + 0)

    err = float(np.linalg.norm(recovered - planted))
    defect = orthogonality_defect(recovered)
    spectrum_spread = float(np.abs(svd(recovered).sigma - 1.0).max())

    ref = aligned[plan.reference_epoch].matrix.astype(np.float64)
    rot = aligned[Epoch(1800)].matrix.astype(np.float64)
    mean_cos = float(np.einsum("ij,ij->i", ref, rot).mean())

    print(f"noise sigma {sigma:>5}: |Q - R0|_F = {err:.2e}   "
          f"defect = {defect:.1e}   max|sigma-1| = {spectrum_spread:.1e}   "
          f"mean aligned cosine = {mean_cos:.6f}")

print("\nRotation error grows with noise; orthogonality never degrades —")
print("the fit projects onto the orthogonal group no matter how dirty the data.")
