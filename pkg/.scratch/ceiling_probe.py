import time
import numpy as np
import beamunfold as bu
from beamunfold import deepfp, solvers
from beamunfold.channel import derive_sample_seed

cfg = bu.NetworkConfig.from_dbm(L=3, K=3, Nt=8, Nr=2, d=1)
train = [bu.generate_scenario(cfg, derive_sample_seed(1, i)) for i in range(2000)]
val = [bu.generate_scenario(cfg, derive_sample_seed(2, i)) for i in range(200)]
ref_val = np.mean([solvers.fastfp_solve(s, cfg, deepfp.sample_initial_V(cfg, s), max_iters=100, tol=0.0).final_wsr_nats() for s in val])
net, _ = deepfp.load_model("/root/pkg/.scratch/full_train2.model")
tc = deepfp.TrainConfig(batch_size=200, initial_lr=0.002, epochs_stage1=0, epochs_stage2=160,
                        label_solver_iters=100, seed=17, lr_halving_epochs=80)
best, log, state = deepfp.train(net, cfg, train, val, tc)
for e in log[::8]:
    print(e["epoch"], f"loss={e['loss']:.4f}", f"ratio={e['val_wsr_nats']/ref_val:.4f}", flush=True)
print(f"ceiling probe best ratio: {state.best_val_nats/ref_val:.4f}")
deepfp.save_model("/root/pkg/.scratch/ceiling_probe.model", best)
