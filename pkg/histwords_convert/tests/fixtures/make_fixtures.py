"""Regenerate the checked-in upstream-layout fixtures. Run from this directory."""
import pickle
from pathlib import Path

import numpy as np

HERE = Path(__file__).parent

# tiny 1800 decade: 3 words, dim 4, values with hand-checkable decimals
m1800 = np.array(
    [
        [1.0, 0.1, -2.5, 0.25],
        [-0.0, 1e-45, 3.4028235e38, 0.5],
        [3.1415927, -1.1754944e-38, 2.0, -7.75],
    ],
    dtype=np.float32,
)
np.save(HERE / "1800-w.npy", m1800)
with open(HERE / "1800-vocab.pkl", "wb") as fh:
    pickle.dump(["steam", "coal", "éngine"], fh, protocol=2)

# second decade so directory scans see an ascending pair
m1810 = np.array([[0.5, -0.5, 1.5, 42.0], [6.25, -0.125, 0.0, 1.0]], dtype=np.float32)
np.save(HERE / "1810-w.npy", m1810)
with open(HERE / "1810-vocab.pkl", "wb") as fh:
    pickle.dump(["coach", "carriage"], fh, protocol=2)

# deliberately inconsistent pair: 4 rows but 3 tokens
bad = HERE / "mismatch"
bad.mkdir(exist_ok=True)
np.save(bad / "1900-w.npy", np.ones((4, 3), dtype=np.float32))
with open(bad / "1900-vocab.pkl", "wb") as fh:
    pickle.dump(["a", "b", "c"], fh, protocol=2)

print("fixtures written to", HERE)
