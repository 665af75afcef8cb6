import time
import numpy as np
import beamunfold as bu
from beamunfold.solvers import fp_solve, fastfp_solve, initial_beamformers
from beamunfold.channel import derive_sample_seed

SIZES = [(1, 1, 2, 1, 1), (1, 2, 4, 2, 1), (2, 2, 4, 2, 2), (3, 3, 8, 2, 1),
         (3, 3, 8, 2, 2), (2, 3, 6, 2, 2), (3, 2, 8, 2, 1), (1, 3, 6, 2, 2)]
t0 = time.time()
bad = 0
worst_dip = 0.0
for i in range(100):
    L, K, Nt, Nr, d = SIZES[i % len(SIZES)]
    cfg = bu.NetworkConfig.from_dbm(L=L, K=K, Nt=Nt, Nr=Nr, d=d)
    ch = bu.generate_scenario(cfg, derive_sample_seed(400, i))
    V0 = initial_beamformers(cfg, ch.seed)
    for solver, kw in ((fp_solve, {}), (fastfp_solve, {"stepsize_policy": "eigen"})):
        tr = solver(ch, cfg, V0, max_iters=200, tol=0.0, **kw)
        series = [tr.initial_wsr_nats] + tr.wsr_nats
        dips = [a - b for a, b in zip(series, series[1:]) if b < a - 1e-9]
        if dips:
            bad += 1
            worst_dip = max(worst_dip, max(dips))
            print(f"instance {i} {solver.__name__}: {len(dips)} dips, worst {max(dips):.2e}")
print(f"violations: {bad}  worst dip {worst_dip:.3e}  runtime {time.time()-t0:.0f}s")
