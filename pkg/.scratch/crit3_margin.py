import time
import numpy as np
import beamunfold as bu
from beamunfold.solvers import fp_solve, fastfp_solve, initial_beamformers
from beamunfold.channel import derive_sample_seed

cfg = bu.NetworkConfig.from_dbm(L=3, K=3, Nt=8, Nr=2, d=1, power_dbm=0.0)
fails = []
t0 = time.time()
for i in range(100):
    ch = bu.generate_scenario(cfg, derive_sample_seed(300, i))
    V0 = initial_beamformers(cfg, ch.seed)
    a = fp_solve(ch, cfg, V0, max_iters=500, tol=1e-10).final_wsr_nats()
    b = fastfp_solve(ch, cfg, V0, max_iters=2500, tol=1e-10).final_wsr_nats()
    rel = abs(a - b) / max(a, b)
    if rel > 0.005:
        fails.append((i, a, b, rel))
print(f"2500-iter pass: {100-sum(1 for f in fails if f[3] > 0.01)}/100, near-misses+fails:", flush=True)
for i, a, b, rel in fails:
    ch = bu.generate_scenario(cfg, derive_sample_seed(300, i))
    V0 = initial_beamformers(cfg, ch.seed)
    b2 = fastfp_solve(ch, cfg, V0, max_iters=10000, tol=1e-12).final_wsr_nats()
    a2 = fp_solve(ch, cfg, V0, max_iters=2000, tol=1e-12).final_wsr_nats()
    print(f"  inst {i}: rel={rel:.4f} -> deep budgets: fp={a2:.5f} ff={b2:.5f} rel={abs(a2-b2)/max(a2,b2):.5f}", flush=True)
print(f"runtime {time.time()-t0:.0f}s")
