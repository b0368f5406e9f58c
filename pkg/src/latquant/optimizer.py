"""Stochastic gradient training of the fusion transform.

The model is G' = B R with B the block-diagonal product generator and R a
parameterized transform:

* householder: row block i of R is the corresponding row range of the
  full-size reflection H(v_i), so each block of R has exactly orthonormal
  rows. All blocks sharing one vector makes R a single reflection, which
  leaves the NSM at the orthogonal-product baseline; training then lets the
  per-block vectors diverge and genuinely mixes the sublattices.
* matrix_exp: R = exp(A), one shared transform, initialized at (or near) a
  rotation via a skew-symmetric A and free to leave the orthogonal group.

Per sample x the loss is ||x - z G'||^2 * V^(-2/n) with z the exact CVP
solution held fixed (piecewise-constant over Voronoi cells), V = |det G'|.
The V term matters: it stops the matrix-exp path from shrinking the loss by
inflating volume.
"""

import hashlib
import json
import os
from dataclasses import dataclass, field, replace

import numpy as np

from .cvp import ClosestPointSolver
from .lattices import GeneratorMatrix, LatticeError, volume
from .nsm import NsmEstimate, estimate_nsm
from .orthogonal import (ExpParam, HouseholderParam, householder_matrix,
                         householder_vjp, matrix_exp, matrix_exp_vjp,
                         skew_init)

CHECKPOINT_FORMAT = "latquant-checkpoint"
CHECKPOINT_VERSION = 1
MIN_TRANSFORM_DET = 1e-8

KIND_HOUSEHOLDER = "householder"
KIND_MATRIX_EXP = "matrix_exp"


class TrainingDiverged(RuntimeError):
    """Mean epoch loss blew past the divergence guard."""


class CheckpointError(ValueError):
    """Unreadable or version-incompatible checkpoint file."""


@dataclass
class FusionModel:
    base: GeneratorMatrix
    kind: str
    params: object            # HouseholderParam or ExpParam
    blocks: tuple             # (offset, size) per fusion block

    def __post_init__(self):
        if self.kind not in (KIND_HOUSEHOLDER, KIND_MATRIX_EXP):
            raise ValueError(f"unknown kind {self.kind!r}")
        if sum(size for _, size in self.blocks) != self.base.dim:
            raise ValueError("block sizes must partition the dimension")

    @property
    def dim(self):
        return self.base.dim

    def copy(self):
        return FusionModel(self.base, self.kind, self.params.copy(), self.blocks)


@dataclass(frozen=True)
class TrainConfig:
    epochs: int
    lr: float
    seed: int
    points_per_epoch: int = 200
    batch: int = 1
    step_period: int = 500      # decay period counted in gradient updates
    step_factor: float = 0.5
    eval_samples: int = 60000
    eval_every: int = 0         # interim NSM estimate every k epochs (0: never)
    checkpoint_every: int = 100
    checkpoint_path: str | None = None

    def __post_init__(self):
        if self.lr < 0:
            raise ValueError("learning rate must be nonnegative")
        if not 0 < self.step_factor <= 1:
            raise ValueError("step decay factor must lie in (0, 1]")
        if self.epochs < 0 or self.points_per_epoch < 1 or self.batch < 1:
            raise ValueError("epochs/points/batch must be positive")

    def config_hash(self) -> str:
        payload = {k: v for k, v in self.__dict__.items() if k != "checkpoint_path"}
        return hashlib.sha256(
            json.dumps(payload, sort_keys=True).encode()).hexdigest()[:16]


@dataclass
class TrainHistory:
    records: list = field(default_factory=list)  # dict per epoch

    def append(self, **kw):
        self.records.append(kw)

    def __len__(self):
        return len(self.records)

    def to_csv(self) -> str:
        lines = ["epoch,lr,mean_loss,nsm_estimate,nsm_std"]
        for r in self.records:
            nsm = r.get("nsm_estimate")
            std = r.get("nsm_std")
            lines.append(
                f"{r['epoch']},{r['lr']!r},{r['mean_loss']!r},"
                f"{'' if nsm is None else repr(nsm)},"
                f"{'' if std is None else repr(std)}")
        return "\n".join(lines) + "\n"


def transform_matrix(model: FusionModel) -> np.ndarray:
    """The n x n fusion transform R for the current parameters."""
    n = model.dim
    if model.kind == KIND_HOUSEHOLDER:
        R = np.empty((n, n))
        for (off, size), v in zip(model.blocks, model.params.vectors):
            R[off:off + size, :] = householder_matrix(v)[off:off + size, :]
        return R
    return matrix_exp(model.params.A)


def assemble(model: FusionModel) -> GeneratorMatrix:
    """Effective generator G' = B R."""
    R = transform_matrix(model)
    if abs(np.linalg.det(R)) <= MIN_TRANSFORM_DET:
        raise LatticeError("fusion transform is numerically singular")
    return GeneratorMatrix(model.base.rows @ R)


def loss(Gp: GeneratorMatrix, x) -> tuple[float, np.ndarray]:
    """Scale-invariant squared quantization error of one point.

    Returns (dist_sq * V^(-2/n), CVP coefficients).
    """
    res = ClosestPointSolver(Gp).closest(x)
    return res.dist_sq * volume(Gp) ** (-2.0 / Gp.dim), res.coeffs


def loss_grad_G(Gp: GeneratorMatrix, x, z) -> np.ndarray:
    """dLoss/dG' holding the CVP solution z fixed.

    With e = x - z G' and V = |det G'|:
        dLoss/dG' = V^(-2/n) * (-2 z^T e) + dist_sq * (-2/n) * V^(-2/n) * G'^-T
    """
    x = np.asarray(x, dtype=float)
    z = np.asarray(z, dtype=float)
    e = x - z @ Gp.rows
    n = Gp.dim
    vpow = volume(Gp) ** (-2.0 / n)
    term_e = -2.0 * vpow * np.outer(z, e)
    term_v = float(e @ e) * (-2.0 / n) * vpow * np.linalg.inv(Gp.rows).T
    return term_e + term_v


def _param_grad(model: FusionModel, dLdR: np.ndarray):
    """Chain dL/dR through the parameterization."""
    if model.kind == KIND_HOUSEHOLDER:
        grads = []
        for (off, size), v in zip(model.blocks, model.params.vectors):
            Hbar = np.zeros_like(dLdR)
            Hbar[off:off + size, :] = dLdR[off:off + size, :]
            grads.append(householder_vjp(v, Hbar))
        return grads
    return matrix_exp_vjp(model.params.A, dLdR)


def _apply_step(model: FusionModel, grad, lr: float):
    if model.kind == KIND_HOUSEHOLDER:
        for v, g in zip(model.params.vectors, grad):
            v -= lr * g
    else:
        model.params.A -= lr * grad


def train_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(entropy=seed)))


def train(model: FusionModel, cfg: TrainConfig, start_epoch: int = 0,
          start_iteration: int = 0, rng_state: dict | None = None):
    """SGD over the fusion parameters with step-decay learning rate.

    Per epoch: sample points on the current lattice, then take one averaged
    gradient step per batch. Returns (trained copy, history); the input
    model is left untouched.
    """
    model = model.copy()
    rng = train_rng(cfg.seed)
    if rng_state is not None:
        rng.bit_generator.state = rng_state
    history = TrainHistory()
    iteration = start_iteration
    initial_mean = None
    B = model.base.rows

    for epoch in range(start_epoch, cfg.epochs):
        lr_epoch = cfg.lr * cfg.step_factor ** (iteration // cfg.step_period)
        Gp = assemble(model)
        u = rng.random((cfg.points_per_epoch, model.dim))
        points = u @ Gp.rows
        losses = []
        for lo in range(0, cfg.points_per_epoch, cfg.batch):
            xs = points[lo:lo + cfg.batch]
            Gp = assemble(model)
            solver = ClosestPointSolver(Gp)
            vpow = volume(Gp) ** (-2.0 / model.dim)
            zs, dists = solver.closest_batch(xs)
            losses.extend(dists * vpow)
            dLdG = np.zeros((model.dim, model.dim))
            for x, z in zip(xs, zs):
                dLdG += loss_grad_G(Gp, x, z)
            dLdG /= len(xs)
            lr_now = cfg.lr * cfg.step_factor ** (iteration // cfg.step_period)
            _apply_step(model, _param_grad(model, B.T @ dLdG), lr_now)
            iteration += 1
        mean_loss = float(np.mean(losses))
        if initial_mean is None:
            initial_mean = mean_loss
        if mean_loss > 10.0 * initial_mean:
            raise TrainingDiverged(
                f"epoch {epoch}: mean loss {mean_loss:.6g} exceeds 10x initial "
                f"{initial_mean:.6g} (lr too high?)")
        rec = {"epoch": epoch, "lr": lr_epoch, "mean_loss": mean_loss}
        if cfg.eval_every and (epoch + 1) % cfg.eval_every == 0:
            est = evaluate(model, cfg.eval_samples, _eval_seed(cfg.seed, epoch))
            rec["nsm_estimate"] = est.mean
            rec["nsm_std"] = est.std_of_mean
        history.append(**rec)
        if cfg.checkpoint_path and cfg.checkpoint_every and \
                (epoch + 1) % cfg.checkpoint_every == 0:
            save_checkpoint(cfg.checkpoint_path, model, cfg, epoch + 1,
                            iteration, rng.bit_generator.state)
    return model, history


def _eval_seed(seed: int, epoch: int) -> int:
    return (seed * 1000003 + epoch + 1) % (2 ** 63)


def evaluate(model: FusionModel, n_samples: int, seed: int,
             workers: int = 1) -> NsmEstimate:
    """NSM of the assembled lattice (fixed parameters)."""
    return estimate_nsm(assemble(model), n_samples, seed, workers=workers)


# ---------------------------------------------------------------------------
# checkpoints

def _params_to_json(model: FusionModel):
    if model.kind == KIND_HOUSEHOLDER:
        return [[repr(float(x)) for x in v] for v in model.params.vectors]
    return [[repr(float(x)) for x in row] for row in model.params.A]


def _params_from_json(kind, data):
    if kind == KIND_HOUSEHOLDER:
        return HouseholderParam([np.array([float(x) for x in v]) for v in data])
    return ExpParam(np.array([[float(x) for x in row] for row in data]))


def save_checkpoint(path: str, model: FusionModel, cfg: TrainConfig,
                    epoch: int, iteration: int, rng_state: dict | None) -> None:
    payload = {
        "format": CHECKPOINT_FORMAT,
        "version": CHECKPOINT_VERSION,
        "kind": model.kind,
        "base_rows": [[repr(float(x)) for x in row] for row in model.base.rows],
        "blocks": [list(b) for b in model.blocks],
        "params": _params_to_json(model),
        "epoch": epoch,
        "iteration": iteration,
        "rng_state": _jsonable(rng_state),
        "config": {k: v for k, v in cfg.__dict__.items() if k != "checkpoint_path"},
        "config_hash": cfg.config_hash(),
    }
    tmp = f"{path}.tmp"
    with open(tmp, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=1)
        fh.write("\n")
    os.replace(tmp, path)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, np.ndarray)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.integer):
        return int(obj)
    return obj


def load_checkpoint(path: str):
    """Returns (model, config, epoch, iteration, rng_state)."""
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise CheckpointError(f"cannot read checkpoint {path}: {exc}") from exc
    if data.get("format") != CHECKPOINT_FORMAT:
        raise CheckpointError(f"{path} is not a checkpoint file")
    if data.get("version") != CHECKPOINT_VERSION:
        raise CheckpointError(
            f"{path}: checkpoint version {data.get('version')} not supported")
    base = GeneratorMatrix(
        np.array([[float(x) for x in row] for row in data["base_rows"]]))
    model = FusionModel(
        base=base,
        kind=data["kind"],
        params=_params_from_json(data["kind"], data["params"]),
        blocks=tuple(tuple(b) for b in data["blocks"]),
    )
    cfg = TrainConfig(**data["config"])
    rng_state = data["rng_state"]
    if rng_state is not None:
        rng_state = _rng_state_from_json(rng_state)
    return model, cfg, data["epoch"], data["iteration"], rng_state


def _rng_state_from_json(state):
    # numpy expects the nested counter/key arrays back as uint64 ndarrays
    out = dict(state)
    inner = dict(out["state"])
    inner["counter"] = np.array(inner["counter"], dtype=np.uint64)
    inner["key"] = np.array(inner["key"], dtype=np.uint64)
    out["state"] = inner
    if "buffer" in out:
        out["buffer"] = np.array(out["buffer"], dtype=np.uint64)
    return out


# ---------------------------------------------------------------------------
# model construction

def make_model(components, kind: str, seed: int,
               init_scale: float = 0.01) -> FusionModel:
    """Fusion model over the optimally scaled product of catalog components.

    householder starts with all blocks sharing one random unit vector (a
    global reflection, so the starting NSM equals the product baseline);
    matrix_exp starts at exp(A) with A skew of magnitude ``init_scale``.
    """
    from .fusion import optimal_spec, build_product

    spec = optimal_spec(components)
    base = build_product(spec)
    rng = np.random.Generator(
        np.random.Philox(np.random.SeedSequence(entropy=seed, spawn_key=(0xC0FFEE,))))
    n = base.dim
    if kind == KIND_HOUSEHOLDER:
        v0 = rng.standard_normal(n)
        v0 /= np.linalg.norm(v0)
        params = HouseholderParam([v0.copy() for _ in spec.blocks])
    elif kind == KIND_MATRIX_EXP:
        params = skew_init(n, init_scale, rng)
    else:
        raise ValueError(f"unknown kind {kind!r}")
    return FusionModel(base=base, kind=kind, params=params, blocks=spec.blocks)
