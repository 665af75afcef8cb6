import time
import numpy as np
import beamunfold as bu
from beamunfold.solvers import fp_solve, fastfp_solve, initial_beamformers
from beamunfold.channel import derive_sample_seed

cfg = bu.NetworkConfig.from_dbm(L=3, K=3, Nt=8, Nr=2, d=1, power_dbm=0.0)
t0 = time.time()
agree = 0
worst = 0.0
for i in range(100):
    ch = bu.generate_scenario(cfg, derive_sample_seed(300, i))
    V0 = initial_beamformers(cfg, ch.seed)
    a = fp_solve(ch, cfg, V0, max_iters=500, tol=1e-10).final_wsr_nats()
    b = fastfp_solve(ch, cfg, V0, max_iters=2500, tol=1e-10).final_wsr_nats()
    rel = abs(a - b) / max(a, b)
    worst = max(worst, rel)
    if rel <= 0.01:
        agree += 1
print(f"agreement: {agree}/100  worst {worst:.5f}  runtime {time.time()-t0:.0f}s", flush=True)
