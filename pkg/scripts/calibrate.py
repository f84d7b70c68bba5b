"""Record thresholds and observed values for the worked family F1.

Run once after changes to the numerics; writes tests/golden/calibration.json.
The thresholds are fixed targets, the observed values document what the
current build achieves and are compared loosely by the tests.
"""

import json
import math
from pathlib import Path

from exjacobi import asympt, opmatrix, spectra
from exjacobi.darboux import reference_family

OUT = Path(__file__).resolve().parents[1] / "tests" / "golden" / "calibration.json"

THRESHOLDS = {
    "trace_gap_n500": 0.02,
    "u_limit_gap_n200": 0.01,
    "a_b_limit_gap_n200": 5e-3,
    "exceptional_gap_n200": 1e-2,
    "ratio_error_n200_z2": 0.01,
    "mehler_heine_rel_err_n500": 1e-2,
    "toeplitz_hausdorff_n400": 0.05,
}


def main():
    F1 = reference_family("F1")
    obs = {}
    for l in (1, 2, 3):
        obs[f"trace_gap_l{l}_n50"] = spectra.trace_gap_experiment(F1, l, 50)
        obs[f"trace_gap_l{l}_n500"] = spectra.trace_gap_experiment(F1, l, 500)
    obs["u_limit_gap_n200"] = opmatrix.recurrence_coeffs(F1, 201).limit_gap(200)
    rec = opmatrix.standard_recurrence(F1, 201)
    obs["a_b_limit_gap_n200"] = max(abs(rec.a[200] - 0.5), abs(rec.b[200]))
    for n in (20, 200, 400):
        obs[f"exceptional_gap_n{n}"] = asympt.exceptional_zero_gap(F1, n)
    lim = asympt.ratio_limit(2)
    for n in (50, 200, 400):
        obs[f"ratio_error_n{n}_z2"] = abs(asympt.ratio_asymptotics(F1, 2, n) - lim)
    for z in (0.5, 1, 2):
        s, ell = asympt.mehler_heine(F1, z, 500)
        obs[f"mehler_heine_rel_err_F1_z{z}"] = abs(s - ell) / abs(ell)
    C = asympt.fit_discrepancy_constant(F1, 50)
    obs["discrepancy_constant_n50"] = C
    obs["discrepancy_n400"] = asympt.regular_zero_discrepancy(F1, 400, C)[0]
    data = {"family": "F1", "thresholds": THRESHOLDS,
            "observed": {k: float(v) for k, v in obs.items()}}
    OUT.write_text(json.dumps(data, indent=2, sort_keys=True) + "\n")
    for k, v in sorted(obs.items()):
        print(f"{k:36s} {v:.6g}")
    assert all(math.isfinite(v) for v in obs.values())


if __name__ == "__main__":
    main()
