"""Command-line interface: catalog, nsm, fuse, train, eval, replay.

Every command that writes an output file also writes a run manifest next to
it (<output>.manifest.json) holding the fully resolved configuration; the
``replay`` command re-runs a manifest and reproduces the outputs.

Exit codes: 0 success, 1 usage error, 2 numeric failure (divergence or
degenerate lattice).
"""

import argparse
import datetime
import json
import math
import os
import secrets
import sys
import time

import numpy as np

from . import __version__
from .lattices import (GeneratorMatrix, LatticeError, UnknownLatticeError,
                       catalog_get, catalog_names, load_catalog,
                       read_lattice_file, write_lattice_file, volume)
from .fusion import (build_product, optimal_spec, parse_components,
                     predicted_product_nsm, product_record)
from .nsm import NsmEstimate, confidence_interval, csv_header, csv_row, estimate_nsm
from .optimizer import (CheckpointError, TrainConfig, TrainingDiverged,
                        evaluate, load_checkpoint, make_model, save_checkpoint,
                        train, train_rng)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NUMERIC = 2

Z95 = 1.959964
Z975 = 2.241403


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _hyperparams():
    path = os.path.join(os.path.dirname(__file__), "data", "hyperparams.json")
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def _resolve_seed(args) -> int:
    if getattr(args, "seed", None) is not None:
        return args.seed
    return secrets.randbits(63)


def _write_manifest(out_path, command, config, seed, artifacts, started):
    manifest = {
        "command": command,
        "config": config,
        "seed": seed,
        "artifacts": artifacts,
        "tool_version": __version__,
        "started": started,
        "finished": _now(),
    }
    path = f"{out_path}.manifest.json"
    tmp = f"{path}.tmp"
    with open(tmp, "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=1)
        fh.write("\n")
    os.replace(tmp, path)
    return path


def _now():
    return datetime.datetime.now(datetime.timezone.utc).isoformat()


def _load_lattice(args):
    if args.file:
        try:
            rec = read_lattice_file(args.file)
        except (OSError, json.JSONDecodeError, KeyError) as exc:
            raise SystemExit(_usage_error(f"cannot read lattice file {args.file}: {exc}"))
        return rec.name, rec.generator
    if not args.lattice:
        raise SystemExit(_usage_error("either a lattice name or --file is required"))
    rec = catalog_get(args.lattice)
    return rec.name, rec.generator


def _usage_error(msg) -> int:
    print(f"error: {msg}", file=sys.stderr)
    return EXIT_USAGE


def _numeric_error(msg) -> int:
    print(f"error: {msg}", file=sys.stderr)
    return EXIT_NUMERIC


def _print_estimate(label, e: NsmEstimate, fmt, n, wall, out=None):
    lo95, hi95 = confidence_interval(e, Z95)
    lo975, hi975 = confidence_interval(e, Z975)
    if fmt == "csv":
        print(csv_header())
        print(csv_row(label, n, e, wall))
    else:
        print(f"lattice      {label}")
        print(f"dim          {n}")
        print(f"samples      {e.n_samples}")
        print(f"seed         {e.seed}")
        print(f"nsm          {e.mean:.8f}")
        print(f"std of mean  {e.std_of_mean:.3g}")
        print(f"95% CI       [{lo95:.8f}, {hi95:.8f}]")
        print(f"97.5% CI     [{lo975:.8f}, {hi975:.8f}]")
        print(f"wall time    {wall:.2f}s")
    if out:
        fresh = not os.path.exists(out)
        with open(out, "a", encoding="utf-8") as fh:
            if fresh:
                fh.write(csv_header() + "\n")
            fh.write(csv_row(label, n, e, wall) + "\n")


# ---------------------------------------------------------------------------
# commands

def cmd_catalog(args) -> int:
    print(f"{'name':6s} {'dim':>3s} {'volume':>14s} {'reference_nsm':>14s}")
    for name in catalog_names():
        rec = catalog_get(name)
        nsm = "-" if rec.reference_nsm is None else f"{rec.reference_nsm:.6f}"
        print(f"{rec.name:6s} {rec.dim:3d} {rec.reference_volume:14.8g} {nsm:>14s}")
    print("\nZ<n> is available for any n >= 1.")
    return EXIT_OK


def cmd_nsm(args) -> int:
    seed = _resolve_seed(args)
    name, G = _load_lattice(args)
    started = _now()
    t0 = time.time()
    try:
        e = estimate_nsm(G, args.samples, seed, workers=args.workers)
    except LatticeError as exc:
        return _numeric_error(str(exc))
    wall = time.time() - t0
    _print_estimate(name, e, args.format, G.dim, wall, args.out)
    if args.out:
        _write_manifest(args.out, "nsm",
                        {"lattice": args.lattice, "file": args.file,
                         "samples": args.samples, "workers": args.workers,
                         "format": args.format, "out": args.out},
                        seed, [args.out], started)
    return EXIT_OK


def cmd_fuse(args) -> int:
    started = _now()
    try:
        comps = parse_components(args.components)
        rec = product_record(comps)
    except (UnknownLatticeError, ValueError) as exc:
        return _usage_error(str(exc))
    out = args.out or (rec.name.replace("*", "_") + ".lat.json")
    write_lattice_file(out, rec)
    _write_manifest(out, "fuse", {"components": args.components, "out": out},
                    None, [out], started)
    spec = optimal_spec(comps)
    print(f"wrote {out}")
    print(f"dim {rec.dim}, volume {rec.reference_volume:.8g}")
    print("scalings: " + ", ".join(
        f"{r.name}={a:.8g}" for r, a in zip(spec.components, spec.scalings)))
    print(f"predicted NSM {rec.reference_nsm:.8f}")
    return EXIT_OK


def _train_defaults(method, dim):
    table = _hyperparams()[method]
    return table.get(str(dim), table["default"])


def cmd_train(args) -> int:
    seed = _resolve_seed(args)
    method = {"householder": "householder", "expm": "matrix_exp"}[args.method]
    try:
        comps = parse_components(args.components)
    except (UnknownLatticeError, ValueError) as exc:
        return _usage_error(str(exc))
    dim = sum(r.dim for r in comps)
    defaults = _train_defaults(method, dim)
    batch = args.batch or defaults["batch"]
    lr = args.lr if args.lr is not None else defaults["lr"]
    points = args.points_per_epoch
    if args.epochs is not None:
        epochs = args.epochs
    else:
        epochs = math.ceil(defaults["iterations"] * batch / points)
    checkpoint = args.checkpoint or f"train_{'_'.join(args.components.split(','))}_{method}.ckpt.json"
    cfg = TrainConfig(
        epochs=epochs, lr=lr, seed=seed, points_per_epoch=points, batch=batch,
        step_period=args.step_period, step_factor=args.step_factor,
        eval_samples=args.eval_samples, eval_every=args.eval_every,
        checkpoint_every=args.checkpoint_every, checkpoint_path=checkpoint,
    )
    started = _now()

    start_epoch = start_iter = 0
    rng_state = None
    model = make_model(comps, method, seed)
    if args.resume:
        try:
            model, cfg_saved, start_epoch, start_iter, rng_state = \
                load_checkpoint(checkpoint)
        except CheckpointError as exc:
            return _usage_error(str(exc))
        if cfg_saved.config_hash() != cfg.config_hash():
            return _usage_error("checkpoint was produced with a different config")
        print(f"resuming at epoch {start_epoch}")

    baseline = predicted_product_nsm(comps)
    print(f"dim {dim} {method}: epochs {cfg.epochs}, batch {cfg.batch}, "
          f"lr {cfg.lr}, seed {seed}")
    print(f"orthogonal-product baseline NSM {baseline:.8f}")
    try:
        trained, history = train(model, cfg, start_epoch=start_epoch,
                                 start_iteration=start_iter, rng_state=rng_state)
    except TrainingDiverged as exc:
        return _numeric_error(str(exc))

    save_checkpoint(checkpoint, trained, cfg, cfg.epochs,
                    start_iter + len(history) * (points // batch), None)
    hist_path = args.out or f"{checkpoint}.history.csv"
    with open(hist_path, "w", encoding="utf-8") as fh:
        fh.write(history.to_csv())
    t0 = time.time()
    est = evaluate(trained, cfg.eval_samples, seed, workers=args.workers)
    wall = time.time() - t0
    _print_estimate(f"trained[{args.components}:{method}]", est, args.format,
                    dim, wall)
    print(f"baseline {baseline:.8f} -> trained {est.mean:.8f} "
          f"({'improved' if est.mean < baseline else 'no improvement'})")
    config = {
        "components": args.components, "method": args.method,
        "epochs": cfg.epochs, "lr": cfg.lr, "batch": cfg.batch,
        "points_per_epoch": points, "step_period": cfg.step_period,
        "step_factor": cfg.step_factor, "eval_samples": cfg.eval_samples,
        "eval_every": cfg.eval_every, "checkpoint_every": cfg.checkpoint_every,
        "checkpoint": checkpoint, "out": hist_path, "workers": args.workers,
        "format": args.format, "resume": args.resume,
    }
    for path in (checkpoint, hist_path):
        _write_manifest(path, "train", config, seed, [checkpoint, hist_path], started)
    return EXIT_OK


def cmd_eval(args) -> int:
    seed = _resolve_seed(args)
    try:
        model, cfg, epoch, _, _ = load_checkpoint(args.checkpoint)
    except CheckpointError as exc:
        return _usage_error(str(exc))
    started = _now()
    t0 = time.time()
    try:
        e = evaluate(model, args.samples, seed, workers=args.workers)
    except LatticeError as exc:
        return _numeric_error(str(exc))
    wall = time.time() - t0
    label = f"checkpoint[{os.path.basename(args.checkpoint)}@{epoch}]"
    _print_estimate(label, e, args.format, model.dim, wall, args.out)
    if args.out:
        _write_manifest(args.out, "eval",
                        {"checkpoint": args.checkpoint, "samples": args.samples,
                         "workers": args.workers, "format": args.format,
                         "out": args.out},
                        seed, [args.out], started)
    return EXIT_OK


def cmd_replay(args) -> int:
    try:
        with open(args.manifest, encoding="utf-8") as fh:
            manifest = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        return _usage_error(f"cannot read manifest: {exc}")
    command = manifest["command"]
    config = manifest["config"]
    argv = [command]
    for key, value in config.items():
        if value in (None, False):
            continue
        if key in ("lattice", "components", "checkpoint") and command in \
                ("nsm", "fuse", "train", "eval"):
            argv.append(str(value))
            continue
        flag = "--" + key.replace("_", "-")
        if value is True:
            argv.append(flag)
        else:
            argv.extend([flag, str(value)])
    if manifest.get("seed") is not None:
        argv.extend(["--seed", str(manifest["seed"])])
    print(f"replaying: latquant {' '.join(argv)}")
    return main(argv)


# ---------------------------------------------------------------------------

def _add_common(p, samples_default=None):
    p.add_argument("--seed", type=int, default=None,
                   help="RNG seed (default: fresh entropy, recorded in manifest)")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--format", choices=("csv", "plain"), default="plain")
    if samples_default is not None:
        p.add_argument("--samples", type=int, default=samples_default)


def build_parser():
    parser = _Parser(prog="latquant",
                     description="lattice quantizer construction, NSM "
                                 "estimation, and fusion training")
    sub = parser.add_subparsers(dest="cmd", required=True)

    sub.add_parser("catalog", help="list catalog lattices")

    p = sub.add_parser("nsm", help="Monte Carlo NSM of a lattice")
    p.add_argument("lattice", nargs="?", help="catalog name, e.g. Z13 or K12")
    p.add_argument("--file", help="lattice file instead of a catalog name")
    p.add_argument("--out", help="append a CSV row to this file")
    _add_common(p, samples_default=100000)

    p = sub.add_parser("fuse", help="optimally scaled product lattice")
    p.add_argument("components", help="e.g. K12,Z or L16,D5s or A2*2")
    p.add_argument("--out", help="output lattice file")

    p = sub.add_parser("train", help="train a fusion transform")
    p.add_argument("components", help="e.g. K12,Z")
    p.add_argument("--method", choices=("householder", "expm"),
                   default="householder")
    p.add_argument("--epochs", type=int, default=None,
                   help="default: per-dimension table")
    p.add_argument("--lr", type=float, default=None)
    p.add_argument("--batch", type=int, default=None)
    p.add_argument("--points-per-epoch", type=int, default=200)
    p.add_argument("--step-period", type=int, default=500,
                   help="decay the lr every this many updates")
    p.add_argument("--step-factor", type=float, default=0.5)
    p.add_argument("--eval-samples", type=int, default=60000)
    p.add_argument("--eval-every", type=int, default=0)
    p.add_argument("--checkpoint", help="checkpoint path")
    p.add_argument("--checkpoint-every", type=int, default=100)
    p.add_argument("--resume", action="store_true",
                   help="continue from the checkpoint file")
    p.add_argument("--out", help="history CSV path")
    _add_common(p)

    p = sub.add_parser("eval", help="evaluate a checkpointed model")
    p.add_argument("checkpoint")
    p.add_argument("--out", help="append a CSV row to this file")
    _add_common(p, samples_default=60000)

    p = sub.add_parser("replay", help="re-run a recorded manifest")
    p.add_argument("manifest")

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "catalog": cmd_catalog,
        "nsm": cmd_nsm,
        "fuse": cmd_fuse,
        "train": cmd_train,
        "eval": cmd_eval,
        "replay": cmd_replay,
    }
    try:
        return handlers[args.cmd](args)
    except UnknownLatticeError as exc:
        return _usage_error(exc.args[0])
    except LatticeError as exc:
        return _numeric_error(str(exc))


if __name__ == "__main__":
    sys.exit(main())
