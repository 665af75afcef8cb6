import json, time
import numpy as np
import beamunfold as bu
from beamunfold import deepfp, solvers
from beamunfold.channel import derive_sample_seed

cfg = bu.NetworkConfig.from_dbm(L=3, K=3, Nt=8, Nr=2, d=1)
train = [bu.generate_scenario(cfg, derive_sample_seed(1, i)) for i in range(2000)]
val = [bu.generate_scenario(cfg, derive_sample_seed(2, i)) for i in range(200)]
test = [bu.generate_scenario(cfg, derive_sample_seed(3, i)) for i in range(500)]

t0 = time.time()
ref = [solvers.fastfp_solve(s, cfg, deepfp.sample_initial_V(cfg, s), max_iters=100, tol=0.0).final_wsr_nats() for s in test]
ref_mean = float(np.mean(ref))
print(f"fastfp@100 test mean: {ref_mean:.4f} ({time.time()-t0:.0f}s)", flush=True)

net = deepfp.init_stepsize_net(T=8, Nt=8, d=1, hidden_layers=2, hidden_units=16, seed=0)
tc = deepfp.TrainConfig(batch_size=200, initial_lr=0.005, epochs_stage1=40, epochs_stage2=260,
                        label_solver_iters=100, seed=0, lr_halving_epochs=30)
t0 = time.time()
best, log, state = deepfp.train(net, cfg, train, val, tc, log_path="/root/pkg/.scratch/full_train2.log.jsonl")
print(f"train: {time.time()-t0:.0f}s  best val {state.best_val_nats:.4f}", flush=True)

vals = []
for s in test:
    V, _ = deepfp.unfold_forward(best, s, deepfp.sample_initial_V(cfg, s), cfg)
    vals.append(bu.objective.wsr_fast(s.H, V, cfg.weights, cfg.noise_power))
test_mean = float(np.mean(vals))
print(f"TEST ratio: {test_mean/ref_mean:.4f}  ({test_mean:.4f} vs {ref_mean:.4f})", flush=True)
deepfp.save_model("/root/pkg/.scratch/full_train2.model", best)
