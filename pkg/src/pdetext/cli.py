"""Command-line interface.

Subcommands: generate, describe, embed, train, eval, rollout, transfer,
ablate, dump-embeddings. Any toolkit error prints to stderr and exits
nonzero.
"""

import argparse
import json
import sys

import numpy as np

from . import harness, pde, text
from .embed import (
    load_store,
    lookup,
    sentence_digest,
    token_histogram,
    tokenize,
    dump_embeddings,
)
from .errors import PdeTextError, StoreMissError
from .harness import ExperimentConfig, MetricsReport
from .model import Surrogate


def _flag_sets(spec):
    if spec == "all":
        return ["none", "b", "c", "q", "bc", "bq", "cq", "bcq"]
    return [s.strip() for s in spec.split(",") if s.strip()]


def cmd_generate(args):
    trajs = pde.generate_trajectories(
        args.equation, args.count, args.seed, grid=args.grid, workers=args.workers
    )
    pde.write_dataset(trajs, args.out)
    print(f"wrote {len(trajs)} {args.equation} trajectories to {args.out}")
    return 0


def cmd_describe(args):
    trajs = pde.read_dataset(args.dataset)
    n = 0
    with open(args.out, "w") as f:
        for flags_text in _flag_sets(args.flags):
            flags = text.DescriptionFlags.parse(flags_text)
            for t in trajs:
                d = text.render_description(t.params, flags)
                f.write(
                    json.dumps(
                        {
                            "params_digest": d.params_digest.hex(),
                            "flags": str(d.flags),
                            "text": d.text,
                        }
                    )
                    + "\n"
                )
                n += 1
    print(f"wrote {n} descriptions to {args.out}")
    return 0


def cmd_embed(args):
    store = load_store(args.store)
    if args.action == "info":
        print(f"store dim {store.dim}, {len(store)} entries")
        return 0
    misses = 0
    total = 0
    with open(args.sentences) as f:
        for line in f:
            if not line.strip():
                continue
            rec = json.loads(line)
            total += 1
            try:
                lookup(store, rec["text"])
            except StoreMissError as err:
                misses += 1
                print(f"miss: {err.digest_hex}", file=sys.stderr)
    print(f"{total - misses}/{total} lookups succeeded (dim {store.dim})")
    return 0 if misses == 0 else 1


def cmd_train(args):
    cfg = ExperimentConfig.from_json_file(args.config)
    data = harness.load_data_for(cfg)
    report, outcomes = harness.train_experiment(cfg, data=data)
    report.save(f"{args.out_prefix}")
    for o in outcomes:
        model = harness.materialize_model(cfg, data, o)
        model.save(f"{args.out_prefix}_seed{o.seed}.ckpt")
    print(report.to_csv(), end="")
    return 0


def _eval_data(args, multimodal):
    cfg = ExperimentConfig(
        task=args.task,
        datasets=[args.dataset],
        flags=args.flags,
        provider=args.provider,
        store=args.store,
        multimodal=multimodal,
        seeds=(args.split_seed,),
    )
    return cfg, harness.load_data_for(cfg)


def cmd_eval(args):
    model = Surrogate.load(args.checkpoint)
    cfg, data = _eval_data(args, model.config.multimodal)
    _, _, test_idx = harness.split_by_dataset(data, args.split_seed, cfg.split)
    pairs = harness.make_pairs(args.task, test_idx)
    overall, by_dataset = harness.evaluate_pairs(model, data, pairs, args.batch_size)
    print(json.dumps({"relative_l2": overall, "by_dataset": by_dataset}, indent=2))
    return 0


def cmd_rollout(args):
    model = Surrogate.load(args.checkpoint)
    cfg, data = _eval_data(args, model.config.multimodal)
    _, _, test_idx = harness.split_by_dataset(data, args.split_seed, cfg.split)
    curve = harness.model_rollout(model, data, test_idx, steps=args.steps)
    report = MetricsReport(task="rollout")
    report.add_curve("rollout", curve)
    with open(args.out, "w") as f:
        f.write(report.curves_csv())
    print(f"accumulated MSE over {args.steps} steps: {curve.sum():.6g}")
    return 0


def cmd_transfer(args):
    cfg = ExperimentConfig.from_json_file(args.config)
    report, _ = harness.run_transfer(cfg)
    report.save(args.out_prefix)
    print(report.to_csv(), end="")
    return 0


def cmd_ablate(args):
    cfg = ExperimentConfig.from_json_file(args.config)
    report, _ = harness.run_ablation(cfg)
    report.save(args.out_prefix)
    print(report.to_csv(), end="")
    return 0


def cmd_dump_embeddings(args):
    trajs = pde.read_dataset(args.dataset)
    store = load_store(args.store) if args.store else None
    rows = []
    for flags_text in _flag_sets(args.flags):
        flags = text.DescriptionFlags.parse(flags_text)
        for t in trajs:
            d = text.render_description(t.params, flags)
            label = {
                "equation": t.params.equation.value,
                "flags": str(flags),
                "digest": d.params_digest.hex(),
            }
            if args.provider == "tokenizer":
                vec = token_histogram(tokenize(d))
            else:
                if store is None:
                    raise PdeTextError("store providers need --store")
                vec = lookup(store, d).values
            rows.append((label, vec))
    dim = rows[0][1].shape[0]
    dump_embeddings(rows, dim, args.out)
    print(f"dumped {len(rows)} vectors of dim {dim} to {args.out}")
    return 0


def build_parser():
    p = argparse.ArgumentParser(prog="pdetext", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="simulate a trajectory dataset")
    g.add_argument("--equation", required=True, choices=["heat", "burgers", "navier_stokes"])
    g.add_argument("--count", type=int, required=True)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--grid", type=int, default=64, help="solver grid for vorticity runs")
    g.add_argument("--workers", type=int, default=None)
    g.add_argument("--out", required=True)
    g.set_defaults(fn=cmd_generate)

    d = sub.add_parser("describe", help="render system descriptions as JSON lines")
    d.add_argument("--dataset", required=True)
    d.add_argument("--flags", default="bcq", help="flag set, comma list, or 'all'")
    d.add_argument("--out", required=True)
    d.set_defaults(fn=cmd_describe)

    e = sub.add_parser("embed", help="embedding store operations")
    e.add_argument("action", choices=["info", "verify"])
    e.add_argument("--store", required=True)
    e.add_argument("--sentences", help="describe output (needed for verify)")
    e.set_defaults(fn=cmd_embed)

    t = sub.add_parser("train", help="train models per an experiment config")
    t.add_argument("--config", required=True)
    t.add_argument("--out-prefix", required=True)
    t.set_defaults(fn=cmd_train)

    ev = sub.add_parser("eval", help="evaluate a checkpoint on a dataset test split")
    ev.add_argument("--checkpoint", required=True)
    ev.add_argument("--dataset", required=True)
    ev.add_argument("--task", default="next_step", choices=["next_step", "fixed_future"])
    ev.add_argument("--flags", default="bcq")
    ev.add_argument("--provider", default="tokenizer")
    ev.add_argument("--store")
    ev.add_argument("--split-seed", type=int, default=0)
    ev.add_argument("--batch-size", type=int, default=16)
    ev.set_defaults(fn=cmd_eval)

    r = sub.add_parser("rollout", help="autoregressive rollout on a test split")
    r.add_argument("--checkpoint", required=True)
    r.add_argument("--dataset", required=True)
    r.add_argument("--task", default="next_step", choices=["next_step"])
    r.add_argument("--flags", default="bcq")
    r.add_argument("--provider", default="tokenizer")
    r.add_argument("--store")
    r.add_argument("--split-seed", type=int, default=0)
    r.add_argument("--steps", type=int, default=40)
    r.add_argument("--out", required=True)
    r.set_defaults(fn=cmd_rollout)

    tr = sub.add_parser("transfer", help="pretrain on a mix, finetune on one dataset")
    tr.add_argument("--config", required=True)
    tr.add_argument("--out-prefix", required=True)
    tr.set_defaults(fn=cmd_transfer)

    ab = sub.add_parser("ablate", help="run all 8 description-flag combinations")
    ab.add_argument("--config", required=True)
    ab.add_argument("--out-prefix", required=True)
    ab.set_defaults(fn=cmd_ablate)

    du = sub.add_parser("dump-embeddings", help="write labeled embedding matrices")
    du.add_argument("--dataset", required=True)
    du.add_argument("--flags", default="all")
    du.add_argument("--provider", default="tokenizer", choices=["tokenizer", "sentence_store", "word_store"])
    du.add_argument("--store")
    du.add_argument("--out", required=True)
    du.set_defaults(fn=cmd_dump_embeddings)

    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except PdeTextError as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    except FileNotFoundError as err:
        print(f"error: {err}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
