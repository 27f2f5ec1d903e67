"""Smoke test for the mtlab extension module.

Build and install first:
    maturin build --release -m crates/python/Cargo.toml -o dist && pip install dist/mtlab-*.whl
"""

import sys

import numpy as np

import mtlab


def check(name, ok, detail=""):
    print(f"{'PASS' if ok else 'FAIL'}  {name}  {detail}")
    return ok


def main():
    results = []

    d = mtlab.Dpss(256, 0.1)
    v = np.array(d.sequences)
    gram = np.abs(v @ v.T - np.eye(d.k)).max()
    results.append(check("dpss orthonormal", gram < 1e-12, f"k={d.k} gram={gram:.2e}"))
    results.append(check("dpss trace", abs(d.trace - 51.2) < 1e-9, f"trace={d.trace:.12f}"))

    # Direct Toeplitz check against numpy.
    n, w = 32, 0.125
    i = np.arange(n)
    diff = i[:, None] - i[None, :]
    with np.errstate(invalid="ignore", divide="ignore"):
        a = np.where(diff == 0, 2 * w, np.sin(2 * np.pi * w * diff) / (np.pi * diff))
    ref = np.linalg.eigvalsh(a)[::-1]
    ours = np.array(mtlab.Dpss(n, w, 4).all_eigenvalues)
    err = np.abs(ref - ours).max()
    results.append(check("eigenvalues match numpy", err < 1e-12, f"max err {err:.2e}"))

    win = mtlab.spectral_window(128, 0.1, m=8192)
    integral = sum(win["window"]) / len(win["window"])
    results.append(check("window integrates to one", abs(integral - 1) < 1e-9, f"{integral:.15f}"))
    split = win["narrow_band"] + win["broad_band"]
    results.append(check("leakage split", abs(split - win["l1_distance"]) < 1e-12))

    model = mtlab.ProcessModel("ar:0.5")
    x = model.generate(4096, seed=1)
    xi, s = mtlab.multitaper(x, 0.01)
    s_true = [model.spectral_density(f) for f in xi]
    rel = np.median(np.abs(np.array(s) / np.array(s_true) - 1))
    results.append(check("multitaper tracks ar(1)", rel < 0.2, f"median rel err {rel:.3f}"))

    xi, p = mtlab.periodogram([1.0, 0.0, 0.0, 0.0], m=16)
    results.append(check("periodogram of impulse", np.allclose(p, 0.25)))

    rows = mtlab.sweep([64, 128, 256], 0.1)
    dist = [r["l1_distance"] for r in rows]
    results.append(check("sweep decreasing", dist[0] > dist[1] > dist[2], str([f"{v:.4f}" for v in dist])))

    rep = mtlab.tradeoff(mtlab.ProcessModel("white"), 256, 0.1, [5, 51], trials=500, seed=3, m=1024)
    ratio = rep[0]["mean_variance"] / rep[1]["mean_variance"]
    results.append(check("variance ratio", 7 < ratio < 13, f"{ratio:.2f}"))

    try:
        mtlab.Dpss(8, 0.6)
        results.append(check("invalid w raises", False))
    except ValueError as e:
        results.append(check("invalid w raises", "w" in str(e), str(e)))

    return 0 if all(results) else 1


if __name__ == "__main__":
    sys.exit(main())
