"""Train a dim-19 matrix-exponential fusion of L16 and the dual of A3.

The transform is exp(A) with A initialized skew-symmetric (a rotation), and
training lets A leave skewness, so the transform may deviate from strict
orthogonality. The optimally scaled product is a stationary point of the
NSM, so plain SGD needs high-rate exploration before a step decay cools it
down; expect a few minutes of runtime.
"""

import numpy as np

from latquant import (TrainConfig, evaluate, make_model, parse_components,
                      predicted_product_nsm, train)

comps = parse_components("L16,A3s")
baseline = predicted_product_nsm(comps)
print(f"orthogonal-product baseline NSM: {baseline:.6f}")

model = make_model(comps, "matrix_exp", seed=1, init_scale=0.01)
cfg = TrainConfig(epochs=1500, lr=1e-2, seed=1, points_per_epoch=200,
                  batch=200, step_period=750, step_factor=0.5)
trained, history = train(model, cfg)

losses = [r["mean_loss"] for r in history.records]
print(f"mean loss: first 100 epochs {np.mean(losses[:100]):.4f}, "
      f"last 100 epochs {np.mean(losses[-100:]):.4f}")

e = evaluate(trained, 60000, seed=777)
gain = baseline - e.mean
print(f"trained NSM: {e.mean:.6f} +- {e.std_of_mean:.1e}")
print(f"improvement over baseline: {gain:.6f} ({gain / e.std_of_mean:.1f} sigma)")
