"""Command-line entry point: ``run(argv)`` dispatches one subcommand and returns its exit code.

Exit codes: 0 ok, 2 usage, 3 parse, 4 validation/format/config, 5 io, 1 unexpected.
On failure exactly one line ``error<TAB><category><TAB><message>`` goes to stderr.
"""
import argparse
import logging
import os
import sys
import time
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import yaml

from .shared.errors import BitextError, ConfigError, UsageError
from .shared.records import Corpus, EmbeddingMatrix
from .corpus.io import (ensure_parent, export_bitext, read_bucc_corpus, read_embeddings, read_gold,
                        read_pairs, write_corpus, write_embeddings, write_pairs)
from .preprocess.lid import bundled_seed_paths, load_seed_samples, parse_lid_specs, train_lid
from .preprocess.rules import PreprocessConfig, preprocess_bitext, preprocess_corpus
from .bpe.model import DEFAULT_NUM_MERGES, apply_bpe, learn_bpe, read_bpe, write_bpe
from .embed_backends.hashed import DEFAULT_DIM, DEFAULT_SEED
from .embed_backends.provider import EmbedConfig, embed_corpus, make_provider
from .search.exact import SearchParams, knn_exact_arrays, NO_NEIGHBOR
from .search.ivf import DEFAULT_KMEANS_ITERS, build_ivf, knn_ivf_arrays, load_ivf, save_ivf
from .mining.filtering import (DEFAULT_THRESHOLD, filter_by_threshold, score_bitext, sweep,
                               threshold_grid)
from .mining.miner import mine
from .mining.stats import histogram_table, length_histogram
from .evaluation.bucc import best_per_source, read_tuned_threshold, score, tune_threshold
from .evaluation.synthetic import SyntheticSpec, generate_synthetic, tuning_spec, write_synthetic

logger = logging.getLogger('Bitext.CLI')

EXIT_CODES = {"usage": 2, "parse": 3, "validation": 4, "format": 4, "config": 4, "io": 5}
LOG_FORMAT = "%(asctime)s %(name)s %(levelname)s %(message)s"


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# --- shared helpers -----------------------------------------------------------

def threads_of(args) -> int:
    if args.threads is not None:
        return max(1, args.threads)
    env = os.getenv("BITEXT_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise ConfigError(f"BITEXT_THREADS must be an integer, got {env!r}") from None
    return 1


def seed_of(args, default: int = DEFAULT_SEED) -> int:
    return default if args.seed is None else args.seed


def show_progress(args) -> bool:
    return not args.quiet and sys.stderr.isatty()


def emit(text: str, path: Optional[str]) -> None:
    """Reports go to ``path`` when given, stdout otherwise."""
    if path:
        ensure_parent(path)
        with open(path, "w", encoding="utf-8", newline="\n") as f:
            f.write(text)
    else:
        sys.stdout.write(text)
        sys.stdout.flush()


def load_aligned(corpus_path: str, lang: str, emb_path: str) -> Tuple[Corpus, EmbeddingMatrix]:
    """Corpus plus its embeddings, restricted to the corpus ids (embeddings may cover a superset)."""
    corpus = read_bucc_corpus(corpus_path, lang)
    emb = read_embeddings(emb_path)
    if list(emb.ids) != corpus.ids():
        emb = emb.select(corpus.ids())
    return corpus, emb


def lid_model_for(args, langs: Sequence[str]):
    if args.no_lid:
        return None
    paths = parse_lid_specs(args.lid_train) if args.lid_train else bundled_seed_paths()
    missing = [lang for lang in langs if lang not in paths]
    if missing:
        raise ConfigError(f"no LID seed text for {', '.join(missing)}; pass --lid-train <tag>=<path> or --no-lid")
    return train_lid(load_seed_samples(paths))


# --- subcommands --------------------------------------------------------------

def cmd_preprocess(args) -> int:
    if len(args.inputs) not in (1, 2) or len(args.lang) != len(args.inputs) or len(args.output) != len(args.inputs):
        raise UsageError("preprocess takes 1 or 2 inputs with as many --lang and -o values")
    cfg = PreprocessConfig(args.max_commas, args.max_words, not args.no_lid, args.lid_min_conf).validate()
    model = lid_model_for(args, args.lang)
    corpora = [read_bucc_corpus(p, lang) for p, lang in zip(args.inputs, args.lang)]
    if len(corpora) == 1:
        kept, report = preprocess_corpus(corpora[0], cfg, model)
        write_corpus(kept, args.output[0])
    else:
        pairs, report = preprocess_bitext(corpora[0], corpora[1], cfg, model)
        write_corpus(Corpus(corpora[0].lang, tuple(s for s, _ in pairs)), args.output[0])
        write_corpus(Corpus(corpora[1].lang, tuple(t for _, t in pairs)), args.output[1])
    emit(report.to_tsv(), args.report)
    return 0


def cmd_bpe_learn(args) -> int:
    langs = args.lang or [f"c{i}" for i in range(len(args.inputs))]
    if len(langs) != len(args.inputs):
        raise UsageError("--lang needs one tag per input corpus")
    corpora = [read_bucc_corpus(p, lang) for p, lang in zip(args.inputs, langs)]
    start = time.time()
    model = learn_bpe(corpora, args.merges, lowercase=args.lowercase)
    ensure_parent(args.output)
    write_bpe(model, args.output)
    logger.info(f"✅ Learned {len(model.merges)} merges in {time.time() - start:.2f}s → {args.output}")
    return 0


def cmd_bpe_apply(args) -> int:
    model = read_bpe(args.model)
    corpus = read_bucc_corpus(args.input, args.lang)
    ensure_parent(args.output)
    with open(args.output, "w", encoding="utf-8", newline="\n") as f:
        for rec in corpus:
            f.write(f"{rec.id}\t{' '.join(apply_bpe(model, rec.text, lowercase=args.lowercase))}\n")
    logger.info(f"✅ Segmented {corpus.size} sentences → {args.output}")
    return 0


def cmd_embed(args) -> int:
    cfg = EmbedConfig(mode=args.mode, dim=args.dim, seed=seed_of(args), bpe_path=args.bpe,
                      source_path=args.source, lowercase=args.lowercase)
    bpe = read_bpe(cfg.bpe_path) if cfg.bpe_path and cfg.mode.startswith("hashed") else None
    provider = make_provider(cfg, bpe)
    corpus = read_bucc_corpus(args.input, args.lang)
    matrix = embed_corpus(provider, corpus, bpe=bpe, threads=threads_of(args), progress=show_progress(args))
    write_embeddings(matrix, args.output)
    return 0


def cmd_index_build(args) -> int:
    targets = read_embeddings(args.input)
    index = build_ivf(targets, nlist=args.nlist, seed=seed_of(args), iters=args.iters, max_train=args.max_train)
    save_ivf(index, args.output)
    return 0


def cmd_index_search(args) -> int:
    if (args.index is None) == (args.targets is None):
        raise UsageError("index-search needs exactly one of --index or --targets")
    queries = read_embeddings(args.input)
    index = load_ivf(args.index) if args.index is not None else None
    params = SearchParams(k=args.k, nprobe=_nprobe_for(args, index)).validate()
    if index is not None:
        target_ids = index.ids
        idx, dist = knn_ivf_arrays(index, queries, params, threads_of(args), show_progress(args))
    else:
        targets = read_embeddings(args.targets)
        target_ids = targets.ids
        idx, dist = knn_exact_arrays(queries, targets, params.k, params, threads_of(args), show_progress(args))
    ensure_parent(args.output)
    with open(args.output, "w", encoding="utf-8", newline="\n") as f:
        for qid, irow, drow in zip(queries.ids, idx, dist):
            for rank, (i, d) in enumerate(zip(irow, drow), start=1):
                if i != NO_NEIGHBOR:
                    f.write(f"{qid}\t{rank}\t{target_ids[int(i)]}\t{d:.6f}\n")
    return 0


def _export(args, pairs, src: Corpus, tgt: Corpus) -> None:
    if bool(args.export_src) != bool(args.export_tgt):
        raise UsageError("--export-src and --export-tgt go together")
    if args.export_src:
        n = export_bitext(pairs, src, tgt, args.export_src, args.export_tgt)
        logger.info(f"📤 Exported {n} sentence pairs")


def _threshold_of(args) -> float:
    if args.threshold_from:
        return read_tuned_threshold(args.threshold_from)
    return args.threshold


def _nprobe_for(args, index) -> int:
    if index is not None and args.nprobe > index.nlist:
        logger.info(f"🔧 nprobe {args.nprobe} clamped to nlist={index.nlist}")
        return index.nlist
    return args.nprobe


def cmd_filter(args) -> int:
    t = _threshold_of(args)
    src, es = load_aligned(args.src, args.src_lang, args.src_emb)
    tgt, et = load_aligned(args.tgt, args.tgt_lang, args.tgt_emb)
    scored = score_bitext(src, tgt, es, et)
    kept = filter_by_threshold(scored, t)
    logger.info(f"📊 Kept {len(kept)}/{len(scored)} pairs at threshold {t}")
    write_pairs(kept, args.output)
    _export(args, kept, src, tgt)
    return 0


def cmd_mine(args) -> int:
    t = _threshold_of(args)
    src, es = load_aligned(args.src, args.src_lang, args.src_emb)
    tgt, et = load_aligned(args.tgt, args.tgt_lang, args.tgt_emb)
    index = load_ivf(args.ivf) if args.ivf else None
    params = SearchParams(k=args.k, nprobe=_nprobe_for(args, index))
    pairs = mine(src, es, tgt, et, params, t, index=index, bidirectional=args.bidirectional,
                 threads=threads_of(args), progress=show_progress(args))
    write_pairs(pairs, args.output)
    _export(args, pairs, src, tgt)
    return 0


def cmd_sweep(args) -> int:
    if args.thresholds:
        grid = args.thresholds
    else:
        grid = threshold_grid(args.start, args.stop, args.step)
    curve = sweep(read_pairs(args.input), grid)
    emit(curve.to_tsv(), args.report)
    return 0


def cmd_stats(args) -> int:
    names = args.names or [os.path.basename(p) for p in args.inputs]
    if len(names) != len(args.inputs):
        raise UsageError("--names needs one name per corpus")
    hists = {}
    for name, path in zip(names, args.inputs):
        hists[name] = length_histogram(read_bucc_corpus(path, args.lang))
        logger.info(f"📊 {name}: {hists[name].total} sentences, mean length "
                    f"{'NA' if hists[name].empty else f'{hists[name].mean_length:.2f}'}")
    emit(histogram_table(hists), args.report)
    return 0


def cmd_eval(args) -> int:
    pairs = read_pairs(args.pairs)
    gold = read_gold(args.gold)
    if args.threshold is not None:
        pairs = filter_by_threshold(pairs, args.threshold)
    if args.best_only:
        pairs = [(s, t) for s, (t, _) in best_per_source(pairs).items()]
    report = score(pairs, gold, args.threshold)
    emit(report.to_tsv() + report.to_json() + "\n", args.report)
    return 0


def cmd_tune(args) -> int:
    _, report = tune_threshold(read_pairs(args.candidates), read_gold(args.gold))
    emit(report.to_tsv() + report.to_json() + "\n", args.report)
    return 0


def cmd_synth(args) -> int:
    spec = SyntheticSpec(n_src=args.n_src, n_tgt=args.n_tgt, n_planted=args.n_planted, dim=args.dim,
                         noise_sigma=args.noise, seed=seed_of(args), text_noise=args.text_noise,
                         src_lang=args.src_lang, tgt_lang=args.tgt_lang)
    write_synthetic(generate_synthetic(spec), args.output)
    if args.tune_planted:
        write_synthetic(generate_synthetic(tuning_spec(spec, args.tune_planted)), os.path.join(args.output, "tune"))
    logger.info(f"✅ Synthetic corpus written to {args.output}")
    return 0


# --- pipeline -----------------------------------------------------------------

@dataclass
class StageConfig:
    name: str
    args: List[str] = field(default_factory=list)


@dataclass
class PipelineConfig:
    stages: List[StageConfig]
    seed: Optional[int] = None
    threads: Optional[int] = None


def load_config(path: str) -> dict:
    with open(path, "r", encoding="utf-8") as f:
        try:
            data = yaml.safe_load(f)
        except yaml.YAMLError as e:
            raise ConfigError(f"{path}: invalid YAML: {e}".replace("\n", " ")) from None
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: expected a mapping at the top level")
    return data


def parse_pipeline(data: dict) -> PipelineConfig:
    unknown = sorted(set(data) - {"seed", "threads", "stages"})
    if unknown:
        raise ConfigError(f"unknown pipeline keys: {', '.join(unknown)}")
    stages = data.get("stages")
    if not isinstance(stages, list) or not stages:
        raise ConfigError("pipeline needs a non-empty 'stages' list")
    out = []
    for i, st in enumerate(stages, start=1):
        if not isinstance(st, dict) or not isinstance(st.get("name"), str):
            raise ConfigError(f"stage {i}: expected a mapping with a 'name'")
        if st["name"] not in COMMANDS or st["name"] == "pipeline":
            raise ConfigError(f"stage {i}: unknown stage {st['name']!r}")
        argv = st.get("args") or []
        if not isinstance(argv, list) or any(isinstance(a, (dict, list)) for a in argv):
            raise ConfigError(f"stage {i} ({st['name']}): 'args' must be a flat list")
        out.append(StageConfig(st["name"], [str(a) for a in argv]))
    for key in ("seed", "threads"):
        if data.get(key) is not None and not isinstance(data[key], int):
            raise ConfigError(f"pipeline {key} must be an integer")
    return PipelineConfig(out, data.get("seed"), data.get("threads"))


def _stage_argv(stage: StageConfig, seed: Optional[int], threads: Optional[int]) -> List[str]:
    argv = [stage.name] + stage.args
    if seed is not None and "--seed" not in stage.args:
        argv += ["--seed", str(seed)]
    if threads is not None and "--threads" not in stage.args:
        argv += ["--threads", str(threads)]
    return argv


def _available(path: str, produced: set, produced_dirs: set) -> bool:
    if os.path.exists(path) or os.path.normpath(path) in produced:
        return True
    norm = os.path.abspath(path)
    return any(norm.startswith(os.path.abspath(d) + os.sep) for d in produced_dirs)


def plan_pipeline(cfg: PipelineConfig, threads: Optional[int] = None) -> List[argparse.Namespace]:
    """Parse every stage and check each input exists or comes from an earlier stage."""
    parser = build_parser()
    produced: set = set()
    produced_dirs: set = set()
    plan = []
    fill_threads = threads if threads is not None else cfg.threads
    for i, stage in enumerate(cfg.stages, start=1):
        try:
            ns = parser.parse_args(_stage_argv(stage, cfg.seed, fill_threads))
        except UsageError as e:
            raise ConfigError(f"stage {i} ({stage.name}): {e}") from None
        inputs, outputs, out_dirs = STAGE_IO[stage.name](ns)
        for path in inputs:
            if not _available(path, produced, produced_dirs):
                raise ConfigError(f"stage {i} ({stage.name}): input {path} is neither on disk "
                                  f"nor produced by an earlier stage")
        produced.update(os.path.normpath(p) for p in outputs)
        produced_dirs.update(out_dirs)
        plan.append(ns)
    return plan


def cmd_pipeline(args) -> int:
    cfg = parse_pipeline(load_config(args.config))
    plan = plan_pipeline(cfg, args.threads)
    for i, ns in enumerate(plan, start=1):
        start = time.time()
        logger.info(f"⏳ Stage {i}/{len(plan)}: {ns.command}")
        ns.quiet = ns.quiet or args.quiet
        ns.func(ns)
        logger.info(f"✅ Stage {i}/{len(plan)} {ns.command} done in {time.time() - start:.2f}s")
    return 0


def _opt(*paths) -> List[str]:
    return [p for p in paths if p]


def _ids(*paths) -> List[str]:
    return [p + ".ids" for p in paths if p]


IoPlan = Tuple[List[str], List[str], List[str]]

STAGE_IO: Dict[str, Callable[[argparse.Namespace], IoPlan]] = {
    "preprocess": lambda a: (a.inputs + _opt(*(v.split("=", 1)[1] for v in a.lid_train or [] if "=" in v)),
                             a.output + _opt(a.report), []),
    "bpe-learn": lambda a: (a.inputs, [a.output], []),
    "bpe-apply": lambda a: ([a.model, a.input], [a.output], []),
    "embed": lambda a: ([a.input] + _opt(a.bpe, a.source), [a.output] + _ids(a.output), []),
    "index-build": lambda a: ([a.input], [a.output] + _ids(a.output), []),
    "index-search": lambda a: ([a.input] + _opt(a.index, a.targets), [a.output], []),
    "filter": lambda a: ([a.src, a.tgt, a.src_emb, a.tgt_emb] + _opt(a.threshold_from),
                         [a.output] + _opt(a.export_src, a.export_tgt), []),
    "mine": lambda a: ([a.src, a.tgt, a.src_emb, a.tgt_emb] + _opt(a.ivf, a.threshold_from),
                       [a.output] + _opt(a.export_src, a.export_tgt), []),
    "sweep": lambda a: ([a.input], _opt(a.report), []),
    "stats": lambda a: (a.inputs, _opt(a.report), []),
    "eval": lambda a: ([a.pairs, a.gold], _opt(a.report), []),
    "tune": lambda a: ([a.candidates, a.gold], _opt(a.report), []),
    "synth": lambda a: ([], [], [a.output]),
}


# --- parser -------------------------------------------------------------------

def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--threads", type=int, default=None, help="worker threads (default: $BITEXT_THREADS or 1)")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--log-level", default=None, help="DEBUG, INFO, WARNING, ... (default: $BITEXT_LOG_LEVEL or INFO)")
    p.add_argument("--quiet", action="store_true", help="no progress bars")
    return p


def _threshold_arg(value: str) -> float:
    try:
        return float(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {value!r}") from None


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    ap = _Parser(prog="bitext", description="Bitext filtering and mining with multilingual sentence embeddings")
    sub = ap.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    def add(name: str, func, help_text: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, parents=[common], help=help_text)
        p.set_defaults(func=func)
        return p

    p = add("preprocess", cmd_preprocess, "comma, length and language-id pre-filtering")
    p.add_argument("inputs", nargs="+", help="corpus TSV, or source and target of a line-aligned bitext")
    p.add_argument("--lang", nargs="+", required=True)
    p.add_argument("-o", "--output", nargs="+", required=True)
    p.add_argument("--max-commas", type=int, default=3)
    p.add_argument("--max-words", type=int, default=50)
    p.add_argument("--lid-train", nargs="+", default=None, metavar="TAG=PATH")
    p.add_argument("--lid-min-conf", type=float, default=0.5)
    p.add_argument("--no-lid", action="store_true")
    p.add_argument("--report", default=None)

    p = add("bpe-learn", cmd_bpe_learn, "learn joint BPE merges over several corpora")
    p.add_argument("inputs", nargs="+")
    p.add_argument("--lang", nargs="+", default=None)
    p.add_argument("--merges", type=int, default=DEFAULT_NUM_MERGES)
    p.add_argument("--lowercase", action="store_true")
    p.add_argument("-o", "--output", required=True)

    p = add("bpe-apply", cmd_bpe_apply, "segment a corpus with a BPE model")
    p.add_argument("input")
    p.add_argument("--model", required=True)
    p.add_argument("--lang", default="und")
    p.add_argument("--lowercase", action="store_true")
    p.add_argument("-o", "--output", required=True)

    p = add("embed", cmd_embed, "embed a corpus into a .bmem matrix")
    p.add_argument("input")
    p.add_argument("--lang", default="und")
    p.add_argument("--mode", default="hashed", choices=["hashed", "file"])
    p.add_argument("--dim", type=int, default=DEFAULT_DIM)
    p.add_argument("--bpe", default=None)
    p.add_argument("--source", default=None, help="precomputed .bmem for --mode file")
    p.add_argument("--lowercase", action="store_true")
    p.add_argument("-o", "--output", required=True)

    p = add("index-build", cmd_index_build, "train and fill an IVF index")
    p.add_argument("input")
    p.add_argument("--nlist", type=int, default=None)
    p.add_argument("--iters", type=int, default=DEFAULT_KMEANS_ITERS)
    p.add_argument("--max-train", type=int, default=None)
    p.add_argument("-o", "--output", required=True)

    p = add("index-search", cmd_index_search, "k nearest targets per query")
    p.add_argument("input", help="query embeddings")
    p.add_argument("--index", default=None)
    p.add_argument("--targets", default=None, help="target embeddings for exact search")
    p.add_argument("--k", type=int, default=20)
    p.add_argument("--nprobe", type=int, default=32)
    p.add_argument("-o", "--output", required=True)

    for name, func, text in (("filter", cmd_filter, "score and threshold a line-aligned bitext"),
                             ("mine", cmd_mine, "mine translation pairs from two corpora")):
        p = add(name, func, text)
        p.add_argument("src")
        p.add_argument("tgt")
        p.add_argument("src_emb")
        p.add_argument("tgt_emb")
        p.add_argument("--src-lang", default="src")
        p.add_argument("--tgt-lang", default="tgt")
        pick = p.add_mutually_exclusive_group()
        pick.add_argument("--threshold", type=_threshold_arg, default=DEFAULT_THRESHOLD)
        pick.add_argument("--threshold-from", default=None, metavar="REPORT",
                          help="use the threshold of a tune report")
        p.add_argument("--export-src", default=None)
        p.add_argument("--export-tgt", default=None)
        p.add_argument("-o", "--output", required=True)
        if name == "mine":
            p.add_argument("--k", type=int, default=20)
            p.add_argument("--ivf", default=None)
            p.add_argument("--nprobe", type=int, default=32)
            p.add_argument("--bidirectional", action="store_true")

    p = add("sweep", cmd_sweep, "pair counts as a function of the threshold")
    p.add_argument("input")
    p.add_argument("--from", dest="start", type=float, default=0.8)
    p.add_argument("--to", dest="stop", type=float, default=1.2)
    p.add_argument("--step", type=float, default=0.05)
    p.add_argument("--thresholds", type=_threshold_arg, nargs="+", default=None)
    p.add_argument("-o", "--report", default=None)

    p = add("stats", cmd_stats, "corpus statistics")
    p.add_argument("kind", choices=["lengths"])
    p.add_argument("inputs", nargs="+")
    p.add_argument("--names", nargs="+", default=None)
    p.add_argument("--lang", default="und")
    p.add_argument("-o", "--report", default=None)

    p = add("eval", cmd_eval, "precision, recall and F1 against a gold alignment")
    p.add_argument("pairs")
    p.add_argument("gold")
    p.add_argument("--threshold", type=_threshold_arg, default=None)
    p.add_argument("--best-only", action="store_true", help="keep the nearest target per source")
    p.add_argument("-o", "--report", default=None)

    p = add("tune", cmd_tune, "F1-optimal threshold on best-match candidates")
    p.add_argument("candidates")
    p.add_argument("gold")
    p.add_argument("-o", "--report", default=None)

    p = add("synth", cmd_synth, "synthetic comparable corpus with planted pairs")
    p.add_argument("--n-src", type=int, default=10000)
    p.add_argument("--n-tgt", type=int, default=10000)
    p.add_argument("--n-planted", type=int, default=5000)
    p.add_argument("--dim", type=int, default=DEFAULT_DIM)
    p.add_argument("--noise", type=float, default=0.1)
    p.add_argument("--text-noise", type=float, default=0.2)
    p.add_argument("--src-lang", default="xx")
    p.add_argument("--tgt-lang", default="yy")
    p.add_argument("--tune-planted", type=int, default=0, help="also write a disjoint tuning corpus under <out>/tune")
    p.add_argument("-o", "--output", required=True)

    p = add("pipeline", cmd_pipeline, "run a multi-stage YAML pipeline")
    p.add_argument("config")
    return ap


COMMANDS = ("preprocess", "bpe-learn", "bpe-apply", "embed", "index-build", "index-search", "filter",
            "mine", "sweep", "stats", "eval", "tune", "synth", "pipeline")


def setup_logging(level: Optional[str]) -> None:
    name = (level or os.getenv("BITEXT_LOG_LEVEL") or "INFO").upper()
    if not isinstance(logging.getLevelName(name), int):
        raise ConfigError(f"unknown log level {name!r}")
    logging.basicConfig(level=name, format=LOG_FORMAT, stream=sys.stderr, force=True)


def _fail(category: str, message: str) -> int:
    print(f"error\t{category}\t{' '.join(str(message).split())}", file=sys.stderr)
    return EXIT_CODES.get(category, 1)


def run(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = build_parser().parse_args(argv)
        setup_logging(args.log_level)
        return args.func(args)
    except SystemExit as e:  # --help
        return int(e.code or 0)
    except BitextError as e:
        return _fail(e.category, str(e))
    except OSError as e:
        return _fail("io", f"{e.filename}: {e.strerror}" if e.filename else str(e))
    except Exception as e:
        logger.exception("💥 Unexpected failure")
        return _fail("internal", f"{type(e).__name__}: {e}")


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
