"""Train a dim-13 Householder fusion of K12 and Z (reduced budget).

Each block of the fusion transform takes its rows from a reflection built
from one learnable vector, so the blocks stay exactly semi-orthogonal while
the sublattices mix. The full published budget is 2000 single-point updates
at learning rate 5e-3; this demo runs the same schedule and prints the
improvement over the orthogonal-product baseline.
"""

from latquant import (TrainConfig, evaluate, make_model, parse_components,
                      predicted_product_nsm, train)

comps = parse_components("K12,Z")
baseline = predicted_product_nsm(comps)
print(f"orthogonal-product baseline NSM: {baseline:.6f}")

model = make_model(comps, "householder", seed=8)
cfg = TrainConfig(epochs=10, lr=5e-3, seed=8, points_per_epoch=200, batch=1,
                  step_period=500, step_factor=0.5)
trained, history = train(model, cfg)

for r in history.records[::3]:
    print(f"  epoch {r['epoch']:2d}: lr {r['lr']:.2e}  mean loss {r['mean_loss']:.4f}")

e = evaluate(trained, 100000, seed=99)
print(f"trained NSM: {e.mean:.6f} +- {e.std_of_mean:.1e}")
print(f"improvement over baseline: {baseline - e.mean:.6f}")
