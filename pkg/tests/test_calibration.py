import numpy as np

from kdecoreset import calibration, ingest, kde, ordering

GRID = kde.GridSpec(64, 64)
KERNEL = kde.KernelParams(0.05)


def small_synth():
    return ingest.synth_generate(4).normalized()


def test_compare_sizes_coreset_beats_rs():
    pts = small_synth()
    rows = calibration.compare_sizes(
        pts, sizes=[200, 500], trials=10, kernel=KERNEL, grid=GRID, seed=0
    )
    for row in rows:
        assert row.coreset_err < row.rs_err


def test_compare_sizes_deterministic():
    pts = small_synth()
    kwargs = dict(sizes=[150], trials=2, kernel=KERNEL, grid=GRID, seed=3)
    a = calibration.compare_sizes(pts, **kwargs)
    b = calibration.compare_sizes(pts, **kwargs)
    assert a[0].rs_err == b[0].rs_err
    assert a[0].coreset_err == b[0].coreset_err


def test_calibrated_c_rs_meets_target():
    # the derived contract: a sample of the formula's size at the calibrated
    # constant reaches L-inf <= eps in at least (1 - delta) of 50 trials
    pts = small_synth()
    eps, delta, trials = 0.02, 0.5, 50
    c = calibration.calibrate_c_rs(
        pts, eps=eps, delta=delta, trials=trials,
        kernel=KERNEL, grid=GRID, seed=17,
    )
    spec = ordering.CoresetSpec(eps=eps, delta=delta, c_rs=c)
    size = min(len(pts), ordering.random_sample_size_for_eps(spec))
    rate = calibration.measure_success_rate(
        pts, size, eps, trials, KERNEL, GRID, seed=17
    )
    assert rate >= 1.0 - delta
