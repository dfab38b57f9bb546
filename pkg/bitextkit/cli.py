"""
The ``bitextkit`` command line interface.

Every command reads files given as arguments and writes to stdout unless
``--out`` is given. Record outputs are JSONL unless ``--format tsv`` is
given or ``--out`` ends with ``.tsv``. Exit codes: 0 on success, 1 on a
runtime error, 2 on a usage error.

``--config`` takes a YAML file with optional ``tokenizers`` (language code
to tokenizer name) and ``filters`` (the filter chain of ``preprocess
clean``) sections. ``run`` takes a pipeline config instead; see
:mod:`bitextkit.pipeline`.
"""

import functools
import json
import logging
import os

import click
import yaml

from bitextkit import tokenization
from bitextkit.augment import (
    DEFAULT_NBEST,
    DEFAULT_QE_THRESHOLD,
    DEFAULT_TEMPLATE,
    at_schedule,
    bit_reconstruct,
    bit_schedule,
    bt_generate,
    dd_generate,
    ft_generate,
    hypo_build,
    sft_records,
    tel_build,
)
from bitextkit.corpus import (
    RecordFormat,
    compute_stats,
    format_record,
    guess_format,
    read_mono,
    read_records,
    write_records,
)
from bitextkit.curriculum import (
    DEFAULT_BINS,
    DEFAULT_PHASES,
    CurriculumBins,
    attach_external_scores,
    build_bins,
    cl_sample,
    load_external_scores,
    score_pairs,
)
from bitextkit.exc import BitextError, ConfigurationError
from bitextkit.metrics import Smoothing, bleu_stats
from bitextkit.pipeline import resolve_config_path, run_pipeline
from bitextkit.preprocess import TranslationTable, filter_chain, ibm1_train, lid_train
from bitextkit.preprocess import split_long as split_sentences
from bitextkit.sentence import Sentence, SentencePair
from bitextkit.subword import BpeModel, bpe_apply_text, bpe_decode_text, bpe_learn
from bitextkit.translators import (
    ChannelScorer,
    DecodeSpec,
    DictTranslator,
    IdentityTranslator,
    LanguageModelScorer,
    LengthRatioQE,
    NgramLM,
    StoredScoreQE,
    lm_train,
)
from bitextkit.util import derive_seed, get_version, logger

__all__ = ("cli", "main")

_RECORD_SUFFIXES = (".jsonl", ".tsv")

_LOG_LEVELS = (logging.WARNING, logging.INFO, logging.DEBUG)


class BitextGroup(click.Group):
    """
    Command group turning library and IO errors into exit code 1.
    """

    def invoke(self, ctx):
        try:
            return super().invoke(ctx)
        except (BitextError, OSError) as error:
            raise click.ClickException(str(error)) from error


def common_options(formats=("jsonl", "tsv")):
    """
    Add ``--seed``, ``--config``, ``--format`` and ``--out`` to a command.
    The loaded config is passed as ``config``.
    """
    def decorator(func):
        @click.option("--seed", type=int, default=0, show_default=True,
                      help="Root seed of every random choice.")
        @click.option("--config", "config_path", type=click.Path(dir_okay=False),
                      help="YAML file with `tokenizers` and `filters` sections.")
        @click.option("--format", "fmt", type=click.Choice(formats), default=None,
                      help="Output format.")
        @click.option("--out", "-o", type=click.Path(dir_okay=False),
                      help="Output file; stdout when omitted.")
        @functools.wraps(func)
        def wrapper(*args, config_path=None, **kwargs):
            config = _load_config(config_path)
            saved = dict(tokenization.options.language_tokenizers)
            tokenization.options.language_tokenizers = dict(
                saved, **config.get("tokenizers", {})
            )
            try:
                return func(*args, config=config, **kwargs)
            finally:
                tokenization.options.language_tokenizers = saved
        return wrapper
    return decorator


def _load_config(path):
    if path is None:
        return {}
    path = resolve_config_path(path)
    with open(path, encoding="utf-8") as f:
        try:
            data = yaml.safe_load(f) or {}
        except yaml.YAMLError as error:
            raise ConfigurationError("Can't parse config %s: %s" % (path, error))
    if not isinstance(data, dict):
        raise ConfigurationError("Config %s must be a mapping" % path)
    tokenizers = data.get("tokenizers") or {}
    if not isinstance(tokenizers, dict):
        raise ConfigurationError("`tokenizers` of %s must be a mapping" % path)
    for name in tokenizers.values():
        tokenization.get_tokenizer(name)
    data["tokenizers"] = tokenizers
    if data.get("filters") is not None:
        data["base_dir"] = os.path.dirname(os.path.abspath(path))
    return data


def _is_records(path):
    return os.fspath(path).endswith(_RECORD_SUFFIXES)


def _read_pairs(path, src_lang="", tgt_lang=""):
    return read_records(path, guess_format(path), lang_src=src_lang, lang_tgt=tgt_lang)


def _write_pairs(records, out, fmt):
    if fmt is None:
        fmt = guess_format(out) if out else RecordFormat.JSONL
    if out:
        count = write_records(records, out, fmt)
    else:
        count = 0
        for pair in records:
            click.echo(format_record(pair, fmt))
            count += 1
    logger.info("Wrote %d records", count)
    return count


def _write_lines(lines, out):
    if out:
        _ensure_parent(out)
        with open(out, "w", encoding="utf-8", newline="\n") as f:
            for line in lines:
                f.write(line)
                f.write("\n")
    else:
        for line in lines:
            click.echo(line)


def _write_text(text, out):
    if out:
        _ensure_parent(out)
        with open(out, "w", encoding="utf-8", newline="\n") as f:
            f.write(text)
    else:
        click.echo(text, nl=False)


def _write_json(data, out, fmt="json"):
    if fmt == "text":
        text = "".join("%s\t%s\n" % (key, json.dumps(data[key])) for key in data)
    else:
        text = json.dumps(data, ensure_ascii=False, indent=2, sort_keys=True) + "\n"
    _write_text(text, out)


def _ensure_parent(path):
    parent = os.path.dirname(os.fspath(path))
    if parent:
        os.makedirs(parent, exist_ok=True)


def _translator(lexicon, src_lang, tgt_lang):
    if lexicon is None:
        return IdentityTranslator(src_lang=src_lang, tgt_lang=tgt_lang)
    return DictTranslator(lexicon, src_lang=src_lang, tgt_lang=tgt_lang)


@click.group(cls=BitextGroup)
@click.option("-v", "--verbose", count=True,
              help="-v for progress messages, -vv for debugging output.")
@click.version_option(get_version(), prog_name="bitextkit")
def cli(verbose):
    """Build machine translation training corpora."""
    logging.basicConfig(
        level=_LOG_LEVELS[min(verbose, len(_LOG_LEVELS) - 1)],
        format="%(levelname)s %(name)s: %(message)s",
    )


@cli.command("run")
@click.argument("pipeline", type=click.Path(dir_okay=False))
@click.option("--jobs", "-j", type=click.IntRange(min=1), default=None,
              help="Worker threads for record-parallel stages.")
@common_options(formats=("json", "text"))
def run_command(pipeline, jobs, seed, fmt, out, config):
    """Run a pipeline config and print its manifest.

    ``--out`` overrides the manifest path of the config. ``--seed`` is
    ignored: the seed of a pipeline is part of its config.
    """
    manifest = run_pipeline(
        resolve_config_path(pipeline),
        jobs=jobs,
        manifest_path=os.path.abspath(out) if out else None,
    )
    if fmt == "text":
        for stage in manifest.stages:
            for item in stage["outputs"]:
                click.echo("%s\t%s\t%s\t%s" % (
                    stage["name"], item["path"], item["records"], item["sha256"]
                ))
    elif out is None:
        click.echo(manifest.dumps(), nl=False)


@cli.command("stats")
@click.argument("corpus", type=click.Path(exists=True, dir_okay=False))
@click.option("--ratio-bucket-width", type=float, default=0.5, show_default=True)
@common_options(formats=("json", "text"))
def stats_command(corpus, ratio_bucket_width, seed, fmt, out, config):
    """Counts, lengths and length ratios of a corpus."""
    stats = compute_stats(_read_pairs(corpus), ratio_bucket_width=ratio_bucket_width)
    _write_json(stats.as_dict(), out, fmt or "json")


@cli.group("preprocess", cls=BitextGroup)
def preprocess_group():
    """Clean and filter corpora, train filter models."""


@preprocess_group.command("clean")
@click.argument("corpus", type=click.Path(exists=True, dir_okay=False))
@click.option("--report", type=click.Path(dir_okay=False),
              help="Write the filter report (JSON) here.")
@common_options()
def clean_command(corpus, report, seed, fmt, out, config):
    """Run the filter chain over a corpus.

    The chain comes from the `filters` section of --config; the default
    chain is used without one.
    """
    stream, filter_report = filter_chain(
        _read_pairs(corpus), config.get("filters"), base_dir=config.get("base_dir")
    )
    _write_pairs(stream, out, fmt)
    if report:
        _write_json(filter_report.as_dict(), report)
    click.echo(
        "kept %d of %d pairs" % (filter_report.output, filter_report.input), err=True
    )


@preprocess_group.command("split")
@click.argument("corpus", type=click.Path(exists=True, dir_okay=False))
@click.option("--max-len", type=int, required=True, help="Maximum tokens per line.")
@click.option("--lang", default="", help="Language of the text.")
@common_options(formats=("text",))
def split_command(corpus, max_len, lang, seed, fmt, out, config):
    """Split long monolingual sentences at sentence-final punctuation."""
    pieces = split_sentences(read_mono(corpus, lang), max_len)
    _write_lines((s.text for s in pieces), out)


@preprocess_group.command("lid-train")
@click.option("--sample", "samples", multiple=True, required=True,
              metavar="LANG=PATH", help="Training text of a language; repeat.")
@click.option("--order", type=int, default=None, help="Character n-gram order.")
@click.option("--k", type=float, default=None, help="Add-k constant.")
@common_options(formats=("json",))
def lid_train_command(samples, order, k, seed, fmt, out, config):
    """Train a language identification model."""
    data = {}
    for item in samples:
        lang, sep, path = item.partition("=")
        if not sep or not lang or not path:
            raise click.BadParameter("expected LANG=PATH, got %r" % item,
                                     param_hint="--sample")
        data[lang] = [s.text for s in read_mono(path, lang)]
    kwargs = {}
    if order is not None:
        kwargs["order"] = order
    if k is not None:
        kwargs["k"] = k
    model = lid_train(data, **kwargs)
    _write_text(
        json.dumps(model.as_dict(), ensure_ascii=False, sort_keys=True) + "\n", out
    )


@preprocess_group.command("ibm1-train")
@click.argument("corpus", type=click.Path(exists=True, dir_okay=False))
@click.option("--iterations", type=int, default=None, help="EM iterations.")
@common_options(formats=("tsv",))
def ibm1_train_command(corpus, iterations, seed, fmt, out, config):
    """Train an IBM Model 1 translation table."""
    if iterations is None:
        table = ibm1_train(_read_pairs(corpus))
    else:
        table = ibm1_train(_read_pairs(corpus), iterations)
    _write_text(table.dumps(), out)


@cli.group("bpe", cls=BitextGroup)
def bpe_group():
    """Learn and apply subword segmentation."""


def _corpus_sentences(path):
    if _is_records(path):
        for pair in _read_pairs(path):
            yield pair.src
            yield pair.tgt
    else:
        yield from read_mono(path)


@bpe_group.command("learn")
@click.argument("corpora", nargs=-1, required=True,
                type=click.Path(exists=True, dir_okay=False))
@click.option("--merges", type=click.IntRange(min=0), default=8000, show_default=True,
              help="Maximum number of merges.")
@click.option("--min-frequency", type=click.IntRange(min=1), default=2, show_default=True)
@common_options(formats=("text",))
def bpe_learn_command(corpora, merges, min_frequency, seed, fmt, out, config):
    """Learn one BPE model over all CORPORA (record or text files)."""
    model = bpe_learn(
        [_corpus_sentences(path) for path in corpora], merges,
        min_frequency=min_frequency,
    )
    _write_text(model.dumps(), out)


@bpe_group.command("apply")
@click.argument("corpus", type=click.Path(exists=True, dir_okay=False))
@click.option("--model", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--lang", default="", help="Language of a text file.")
@common_options()
def bpe_apply_command(corpus, model, lang, seed, fmt, out, config):
    """Segment a record or text file into subwords."""
    bpe = BpeModel.load(model)
    if _is_records(corpus):
        _write_pairs(
            (
                SentencePair(
                    Sentence(bpe_apply_text(bpe, pair.src), pair.src.lang),
                    Sentence(bpe_apply_text(bpe, pair.tgt), pair.tgt.lang),
                    pair.provenance,
                    pair.scores,
                )
                for pair in _read_pairs(corpus)
            ),
            out, fmt,
        )
    else:
        _write_lines((bpe_apply_text(bpe, s) for s in read_mono(corpus, lang)), out)


@bpe_group.command("decode")
@click.argument("corpus", type=click.Path(exists=True, dir_okay=False))
@click.option("--lang", default="", help="Language of a text file.")
@common_options()
def bpe_decode_command(corpus, lang, seed, fmt, out, config):
    """Join subwords back into words."""
    if _is_records(corpus):
        _write_pairs(
            (
                SentencePair(
                    Sentence(bpe_decode_text(pair.src.text, pair.src.lang),
                             pair.src.lang),
                    Sentence(bpe_decode_text(pair.tgt.text, pair.tgt.lang),
                             pair.tgt.lang),
                    pair.provenance,
                    pair.scores,
                )
                for pair in _read_pairs(corpus)
            ),
            out, fmt,
        )
    else:
        _write_lines(
            (bpe_decode_text(s.text, lang) for s in read_mono(corpus, lang)), out
        )


@cli.group("lm", cls=BitextGroup)
def lm_group():
    """n-gram language models."""


@lm_group.command("train")
@click.argument("corpus", type=click.Path(exists=True, dir_okay=False))
@click.option("--order", type=click.IntRange(min=1), default=3, show_default=True)
@click.option("--k", type=float, default=1.0, show_default=True, help="Add-k constant.")
@click.option("--side", type=click.Choice(["src", "tgt"]), default="tgt",
              show_default=True, help="Side of a record file to train on.")
@common_options(formats=("json",))
def lm_train_command(corpus, order, k, side, seed, fmt, out, config):
    """Train an add-k n-gram language model."""
    if _is_records(corpus):
        sentences = (getattr(pair, side) for pair in _read_pairs(corpus))
    else:
        sentences = read_mono(corpus)
    lm = lm_train(sentences, order, k)
    _write_text(json.dumps(lm.as_dict(), ensure_ascii=False) + "\n", out)


@cli.group("augment", cls=BitextGroup)
def augment_group():
    """Generate synthetic training data."""


_lexicon_option = click.option(
    "--lexicon", type=click.Path(exists=True, dir_okay=False),
    help="Lexicon of the translator (src, tgt, prob TSV); identity when omitted.",
)
_src_lang_option = click.option("--src-lang", default="", help="Source language.")
_tgt_lang_option = click.option("--tgt-lang", default="", help="Target language.")
_width_option = click.option("--width", type=click.IntRange(min=1), default=None,
                             help="Beam width.")


def _beam(width):
    return None if width is None else DecodeSpec.beam(width)


@augment_group.command("bit")
@click.argument("corpus", type=click.Path(exists=True, dir_okay=False))
@common_options()
def bit_command(corpus, seed, fmt, out, config):
    """Append direction-reversed copies of every pair."""
    _write_pairs(bit_reconstruct(_read_pairs(corpus)), out, fmt)


@augment_group.command("dd")
@click.argument("corpus", type=click.Path(exists=True, dir_okay=False))
@click.option("--fwd-lexicon", multiple=True,
              type=click.Path(exists=True, dir_okay=False),
              help="Lexicon of a forward model; repeat for several.")
@click.option("--bwd-lexicon", multiple=True,
              type=click.Path(exists=True, dir_okay=False),
              help="Lexicon of a backward model; repeat for several.")
@click.option("--dedup", is_flag=True, help="Drop duplicate pairs.")
@_src_lang_option
@_tgt_lang_option
@_width_option
@common_options()
def dd_command(corpus, fwd_lexicon, bwd_lexicon, dedup, src_lang, tgt_lang, width,
               seed, fmt, out, config):
    """Data diversification with forward and backward models."""
    fwd = [_translator(p, src_lang, tgt_lang) for p in fwd_lexicon or [None]]
    bwd = [_translator(p, tgt_lang, src_lang) for p in bwd_lexicon or [None]]
    _write_pairs(
        dd_generate(_read_pairs(corpus, src_lang, tgt_lang), fwd, bwd,
                    spec=_beam(width), dedup=dedup),
        out, fmt,
    )


@augment_group.command("ft")
@click.argument("mono", type=click.Path(exists=True, dir_okay=False))
@click.option("--sample-size", type=click.IntRange(min=0), required=True)
@_lexicon_option
@_src_lang_option
@_tgt_lang_option
@_width_option
@common_options()
def ft_command(mono, sample_size, lexicon, src_lang, tgt_lang, width, seed, fmt, out,
               config):
    """Forward-translate a sample of source monolingual data."""
    teacher = _translator(lexicon, src_lang, tgt_lang)
    _write_pairs(
        ft_generate(read_mono(mono, src_lang), teacher, sample_size,
                    derive_seed(seed, "ft"), spec=_beam(width)),
        out, fmt,
    )


@augment_group.command("bt")
@click.argument("mono", type=click.Path(exists=True, dir_okay=False))
@click.option("--mode", type=click.Choice(["beam", "sampling"]), default="beam",
              show_default=True)
@click.option("--tagged", is_flag=True, help="Prepend the back-translation tag.")
@click.option("--tag", default=None, help="Tag token (default <BT>).")
@click.option("--temperature", type=float, default=None, help="Sampling temperature.")
@_lexicon_option
@_src_lang_option
@_tgt_lang_option
@_width_option
@common_options()
def bt_command(mono, mode, tagged, tag, temperature, lexicon, src_lang, tgt_lang, width,
               seed, fmt, out, config):
    """Back-translate target monolingual data.

    The lexicon translates from the target language to the source language.
    """
    reverse = _translator(lexicon, tgt_lang, src_lang)
    kwargs = {}
    if tag is not None:
        kwargs["tag"] = tag
    if width is not None:
        kwargs["width"] = width
    if temperature is not None:
        kwargs["temperature"] = temperature
    _write_pairs(
        bt_generate(read_mono(mono, tgt_lang), reverse, mode, tagged,
                    seed=derive_seed(seed, "bt"), **kwargs),
        out, fmt,
    )


@augment_group.command("tel")
@click.argument("sources", type=click.Path(exists=True, dir_okay=False))
@click.option("--lexicon", "lexicons", multiple=True, required=True,
              type=click.Path(exists=True, dir_okay=False),
              help="Lexicon of an ensemble member; repeat for several.")
@click.option("--dedup", is_flag=True, help="Drop duplicate pairs.")
@_src_lang_option
@_tgt_lang_option
@_width_option
@common_options()
def tel_command(sources, lexicons, dedup, src_lang, tgt_lang, width, seed, fmt, out,
                config):
    """Translate test sources with every ensemble member."""
    models = [_translator(p, src_lang, tgt_lang) for p in lexicons]
    _write_pairs(
        tel_build(read_mono(sources, src_lang), models, spec=_beam(width), dedup=dedup),
        out, fmt,
    )


@augment_group.command("hypo")
@click.argument("corpus", type=click.Path(exists=True, dir_okay=False))
@click.option("--qe", type=click.Choice(["stored", "length_ratio"]), default="stored",
              show_default=True, help="Quality estimator.")
@click.option("--qe-key", default="qe", show_default=True,
              help="Score holding the stored quality estimate.")
@click.option("--threshold", type=float, default=DEFAULT_QE_THRESHOLD, show_default=True,
              help="Keep pairs scoring strictly above this.")
@click.option("--n", "nbest", type=click.IntRange(min=1), default=DEFAULT_NBEST,
              show_default=True, help="n-best size.")
@click.option("--sft", is_flag=True, help="Write {prompt, completion} records.")
@click.option("--template", type=click.Path(exists=True, dir_okay=False),
              help="Prompt template file for --sft.")
@_lexicon_option
@_src_lang_option
@_tgt_lang_option
@common_options(formats=("jsonl",))
def hypo_command(corpus, qe, qe_key, threshold, nbest, sft, template, lexicon, src_lang,
                 tgt_lang, seed, fmt, out, config):
    """Build post-editing records from n-best lists of the base model."""
    base = _translator(lexicon, src_lang, tgt_lang)
    estimator = LengthRatioQE() if qe == "length_ratio" else StoredScoreQE(qe_key)
    records = hypo_build(
        _read_pairs(corpus, src_lang, tgt_lang), base, estimator, threshold, nbest
    )
    if sft:
        text = DEFAULT_TEMPLATE
        if template:
            with open(template, encoding="utf-8") as f:
                text = f.read()
        items = sft_records(records, text)
    else:
        items = (record.to_dict() for record in records)
    _write_lines((json.dumps(item, ensure_ascii=False) for item in items), out)


@augment_group.command("schedule")
@click.argument("authentic", type=click.Path(exists=True, dir_okay=False))
@click.argument("synthetic", nargs=-1, type=click.Path(exists=True, dir_okay=False))
@click.option("--kind", type=click.Choice(["at", "bit"]), default="at", show_default=True,
              help="at: alternated training; bit: bidirectional then original.")
@click.option("--rounds", type=int, default=1, show_default=True, help="AT rounds.")
@click.option("--passes", type=int, default=1, show_default=True,
              help="Passes per phase.")
@common_options(formats=("json",))
def schedule_command(authentic, synthetic, kind, rounds, passes, seed, fmt, out, config):
    """Write a training schedule over dataset files.

    For --kind bit, AUTHENTIC is the bidirectional dataset and the single
    SYNTHETIC argument the original one.
    """
    if kind == "bit":
        if len(synthetic) != 1:
            raise click.UsageError("--kind bit takes exactly two datasets")
        schedule = bit_schedule(authentic, synthetic[0], passes=(passes, passes))
    else:
        schedule = at_schedule(authentic, list(synthetic), rounds, passes=passes)
    _write_text(schedule.dumps(), out)


@cli.group("curriculum", cls=BitextGroup)
def curriculum_group():
    """Difficulty scoring and curriculum sampling."""


@curriculum_group.command("score")
@click.argument("corpus", type=click.Path(exists=True, dir_okay=False))
@click.option("--in-lm", type=click.Path(exists=True, dir_okay=False),
              help="In-domain language model (JSON).")
@click.option("--out-lm", type=click.Path(exists=True, dir_okay=False),
              help="General-domain language model (JSON).")
@click.option("--table", type=click.Path(exists=True, dir_okay=False),
              help="Translation table; scores with a noisy channel model.")
@click.option("--scores", type=click.Path(exists=True, dir_okay=False),
              help="Precomputed `index, logprob_in, logprob_out` rows.")
@common_options()
def curriculum_score_command(corpus, in_lm, out_lm, table, scores, seed, fmt, out,
                             config):
    """Attach logprob_in, logprob_out and q to every pair."""
    pairs = _read_pairs(corpus)
    if scores:
        if in_lm or out_lm or table:
            raise click.UsageError("--scores can't be combined with models")
        _write_pairs(attach_external_scores(pairs, load_external_scores(scores)),
                     out, fmt)
        return
    if not (in_lm and out_lm):
        raise click.UsageError("Give --in-lm and --out-lm, or --scores")
    channel = TranslationTable.load(table) if table else None

    def scorer(path):
        lm = NgramLM.load(path)
        return LanguageModelScorer(lm) if channel is None else ChannelScorer(channel, lm)

    _write_pairs(score_pairs(pairs, scorer(in_lm), scorer(out_lm)), out, fmt)


@curriculum_group.command("bins")
@click.argument("corpus", type=click.Path(exists=True, dir_okay=False))
@click.option("--bins", "num_bins", type=click.IntRange(min=1), default=DEFAULT_BINS,
              show_default=True)
@click.option("--phases", type=click.IntRange(min=1), default=DEFAULT_PHASES,
              show_default=True)
@common_options(formats=("json",))
def curriculum_bins_command(corpus, num_bins, phases, seed, fmt, out, config):
    """Split scored pairs into difficulty bins."""
    bins = build_bins(_read_pairs(corpus), num_bins, phases=phases)
    _write_text(json.dumps(bins.to_dict()) + "\n", out)


@curriculum_group.command("sample")
@click.argument("bins_file", metavar="BINS", type=click.Path(exists=True, dir_okay=False))
@click.option("--phase", type=int, required=True, help="Phase index, from 0.")
@click.option("--batch-size", type=click.IntRange(min=1), required=True)
@click.option("--num-batches", type=click.IntRange(min=0), required=True)
@click.option("--epoch-coverage", is_flag=True,
              help="Emit every record of the phase once before sampling.")
@common_options(formats=("jsonl",))
def curriculum_sample_command(bins_file, phase, batch_size, num_batches, epoch_coverage,
                              seed, fmt, out, config):
    """Sample batches of record indices for one phase."""
    bins = CurriculumBins.load(bins_file)
    batches = cl_sample(
        bins, phase, batch_size, derive_seed(seed, "curriculum"),
        num_batches=num_batches, epoch_coverage=epoch_coverage,
    )
    _write_lines(
        (json.dumps({"batch": i, "indices": batch}) for i, batch in enumerate(batches)),
        out,
    )


@cli.group("score", cls=BitextGroup)
def score_group():
    """Evaluation metrics."""


@score_group.command("bleu")
@click.argument("hypotheses", type=click.Path(exists=True, dir_okay=False))
@click.argument("references", type=click.Path(exists=True, dir_okay=False))
@click.option("--lang", default="", help="Language of both files.")
@click.option("--max-n", type=click.IntRange(min=1), default=4, show_default=True)
@click.option("--smoothing", type=click.Choice([s.value for s in Smoothing]),
              default="none", show_default=True)
@common_options(formats=("json", "text"))
def bleu_command(hypotheses, references, lang, max_n, smoothing, seed, fmt, out, config):
    """Corpus BLEU of HYPOTHESES against REFERENCES, one sentence per line."""
    result = bleu_stats(
        list(_read_lines(hypotheses, lang)),
        list(_read_lines(references, lang)),
        max_n, smoothing,
    )
    _write_json(
        {
            "bleu": result.score,
            "brevity_penalty": result.brevity_penalty,
            "precisions": result.precisions,
        },
        out, fmt or "json",
    )


def _read_lines(path, lang):
    # Empty lines are kept; they are empty hypotheses.
    with open(path, encoding="utf-8", newline="\n") as f:
        for line in f:
            yield Sentence(line.rstrip("\r\n"), lang)


def main():
    cli(prog_name="bitextkit")
