"""
Config-driven pipelines. A YAML file lists stages; each stage applies one
operation of the toolkit to files and writes its result to a file::

    seed: 13
    tokenizers:
      zh: char
    translators:
      en-zh:
        type: lexicon
        lexicon: lex.en-zh.tsv
        src_lang: en
        tgt_lang: zh
    stages:
      - op: dedup
        input: train.jsonl
        output: work/dedup.jsonl
      - op: filter_chain
        input: work/dedup.jsonl
        output: work/clean.jsonl
      - op: ft
        input: mono.en
        output: work/ft.jsonl
        params: {teacher: en-zh, sample_size: 1000}

Relative paths are resolved against the directory of the config file.
Every stage gets its own seed derived from the root ``seed`` and the stage
name, so inserting a stage leaves the randomness of the others alone.

:func:`run_pipeline` writes a :class:`Manifest` listing, per stage, the
parameters, the seed and the sha256 digest and record count of every input
and output. Running the same config over the same inputs reproduces the
manifest byte for byte.
"""

import json
import os
import pathlib

import yaml

from bitextkit import tokenization
from bitextkit.augment import (
    at_schedule,
    bit_reconstruct,
    bit_schedule,
    bt_generate,
    dd_generate,
    ft_generate,
    hypo_build,
    tel_build,
    write_ape_records,
    write_sft,
)
from bitextkit.augment.ape import DEFAULT_NBEST, DEFAULT_QE_THRESHOLD, DEFAULT_TEMPLATE
from bitextkit.corpus import (
    compute_stats,
    count_lines,
    guess_format,
    read_mono,
    read_records,
    write_mono,
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
from bitextkit.exc import ConfigurationError, StageError, StageNotFound
from bitextkit.extra.sharding import ShardedMap
from bitextkit.preprocess import (
    TranslationTable,
    dedup,
    filter_chain,
    ibm1_train,
    lid_train,
    split_long,
)
from bitextkit.sentence import Sentence, SentencePair
from bitextkit.subword import BpeModel, bpe_apply_text, bpe_learn
from bitextkit.translators import (
    ChannelScorer,
    DecodeSpec,
    LanguageModelScorer,
    LengthRatioQE,
    NgramLM,
    StoredScoreQE,
    get_translator_for_name,
    lm_train,
)
from bitextkit.util import DEFAULT_SENTINEL, __version__, derive_seed, file_digest, logger

__all__ = (
    "CONFIG_DIR_ENV",
    "STAGE_OPS",
    "Manifest",
    "PipelineConfig",
    "Stage",
    "resolve_config_path",
    "run_pipeline",
)

#: Environment variable naming a directory searched for relative config
#: paths missing from the working directory.
CONFIG_DIR_ENV = "BITEXTKIT_CONFIG_DIR"

TOOLKIT = "bitextkit"

DEFAULT_MANIFEST = "manifest.json"
DEFAULT_SHARD_SIZE = 1000

# Translator parameters holding file paths.
_TRANSLATOR_PATH_PARAMS = ("lexicon",)

# File kinds; record counts are reported for the first two.
RECORDS = "records"
MONO = "mono"
FILE = "file"

_RECORD_SUFFIXES = (".jsonl", ".tsv")

STAGE_OPS = {}


class StageOp:
    """
    A registered stage operation.
    """

    __slots__ = (
        "name", "func", "params", "required", "inputs", "output",
        "min_inputs", "max_inputs", "path_params", "translator_params",
    )

    def __init__(self, name, func, *, params, required, inputs, output,
                 min_inputs, max_inputs, path_params, translator_params):
        self.name = name
        self.func = func
        self.params = frozenset(params) | frozenset(required)
        self.required = frozenset(required)
        self.inputs = inputs
        self.output = output
        self.min_inputs = min_inputs
        self.max_inputs = max_inputs
        self.path_params = tuple(path_params)
        self.translator_params = tuple(translator_params)

    def __repr__(self):
        return "StageOp(%r)" % self.name


def stage_op(name, *, params=(), required=(), inputs=RECORDS, output=RECORDS,
             min_inputs=1, max_inputs=1, path_params=(), translator_params=()):
    """
    Register a function ``func(ctx, stage)`` as the stage operation ``name``.
    """
    def decorator(func):
        STAGE_OPS[name] = StageOp(
            name, func,
            params=params, required=required,
            inputs=inputs, output=output,
            min_inputs=min_inputs, max_inputs=max_inputs,
            path_params=path_params, translator_params=translator_params,
        )
        return func
    return decorator


def get_stage_op(name, stage=None):
    try:
        return STAGE_OPS[name]
    except (KeyError, TypeError):
        where = " in stage %r" % stage if stage is not None else ""
        raise StageNotFound(
            "Unknown operation '%s'%s; options are: %s"
            % (name, where, sorted(STAGE_OPS)),
            name=name,
        )


class Stage:
    """
    One configured step of a pipeline.
    """

    __slots__ = ("name", "op", "inputs", "output", "params")

    def __init__(self, name, op, inputs, output, params=None):
        self.name = name
        self.op = op
        self.inputs = list(inputs)
        self.output = output
        self.params = dict(params or {})

    @classmethod
    def from_dict(cls, data, index):
        if not isinstance(data, dict):
            raise ConfigurationError("Stage #%d is not a mapping: %r" % (index, data))
        unknown = set(data) - {"name", "op", "input", "inputs", "output", "params"}
        if unknown:
            raise ConfigurationError(
                "Stage #%d has unknown keys: %s" % (index, ", ".join(sorted(unknown)))
            )
        op = data.get("op")
        if not op:
            raise ConfigurationError("Stage #%d has no `op`" % index)
        name = str(data.get("name") or op)
        if "input" in data and "inputs" in data:
            raise ConfigurationError("Stage %r sets both `input` and `inputs`" % name)
        inputs = data.get("inputs", data.get("input", []))
        if isinstance(inputs, str):
            inputs = [inputs]
        params = data.get("params") or {}
        if not isinstance(params, dict):
            raise ConfigurationError("Params of stage %r must be a mapping" % name)
        return cls(name, op, inputs, data.get("output"), params)

    def as_dict(self):
        return {
            "name": self.name,
            "op": self.op,
            "inputs": list(self.inputs),
            "output": self.output,
            "params": dict(self.params),
        }

    def __repr__(self):
        return "Stage(%r, op=%r)" % (self.name, self.op)


class PipelineConfig:
    """
    A validated pipeline: stages, the root seed, per-language tokenizers and
    named translators.

    Please keep the attributes sorted (in the source code) in alphabetic
    order.

    Attributes:
        base_dir
            Directory relative paths are resolved against.

        jobs
            Worker threads for record-parallel stages.

        manifest
            Path of the manifest written by :func:`run_pipeline`.

        seed
            Root seed. Required: nothing defaults to the clock.

        shard_size
            Records per shard when ``jobs > 1``.

        stages
            List of :class:`Stage`.

        tokenizers
            Language code to tokenizer name, applied on top of
            :attr:`bitextkit.tokenization.options.language_tokenizers`.

        translators
            Name to translator spec: ``{"type": ..., **kwargs}``.
    """

    def __init__(self, stages, seed, *, base_dir=".", jobs=1,
                 manifest=DEFAULT_MANIFEST, shard_size=DEFAULT_SHARD_SIZE,
                 tokenizers=None, translators=None):
        self.base_dir = os.fspath(base_dir)
        self.jobs = jobs
        self.manifest = manifest
        self.seed = seed
        self.shard_size = shard_size
        self.stages = list(stages)
        self.tokenizers = dict(tokenizers or {})
        self.translators = dict(translators or {})
        self.validate()

    @classmethod
    def from_dict(cls, data, base_dir="."):
        if not isinstance(data, dict):
            raise ConfigurationError("A pipeline config must be a mapping")
        unknown = set(data) - {
            "jobs", "manifest", "seed", "shard_size", "stages", "tokenizers",
            "translators",
        }
        if unknown:
            raise ConfigurationError(
                "Unknown pipeline config keys: %s" % ", ".join(sorted(unknown))
            )
        if "seed" not in data:
            raise ConfigurationError("A pipeline config needs a `seed`")
        stages = data.get("stages")
        if not isinstance(stages, list) or not stages:
            raise ConfigurationError("A pipeline config needs a non-empty `stages` list")
        return cls(
            [Stage.from_dict(item, i) for i, item in enumerate(stages, start=1)],
            data["seed"],
            base_dir=base_dir,
            jobs=data.get("jobs", 1),
            manifest=data.get("manifest", DEFAULT_MANIFEST),
            shard_size=data.get("shard_size", DEFAULT_SHARD_SIZE),
            tokenizers=data.get("tokenizers"),
            translators=data.get("translators"),
        )

    @classmethod
    def load(cls, path):
        """
        Read a YAML config; relative paths in it are relative to its
        directory.
        """
        path = resolve_config_path(path)
        with open(path, encoding="utf-8") as f:
            try:
                data = yaml.safe_load(f)
            except yaml.YAMLError as error:
                raise ConfigurationError(
                    "Can't parse pipeline config %s: %s" % (path, error)
                )
        return cls.from_dict(data, os.path.dirname(os.path.abspath(path)))

    def path(self, path):
        path = os.fspath(path)
        if os.path.isabs(path):
            return path
        return os.path.join(self.base_dir, path)

    def relpath(self, path):
        """
        ``path`` relative to :attr:`base_dir`, with forward slashes.
        """
        rel = os.path.relpath(self.path(path), self.base_dir)
        return pathlib.PurePath(rel).as_posix()

    def validate(self):
        """
        Check everything which can be checked without running a stage.

        :raises bitextkit.exc.StageNotFound: for an unknown operation; the
            message names the stage.
        :raises bitextkit.exc.ConfigurationError: for anything else.
        """
        if not isinstance(self.seed, int) or isinstance(self.seed, bool):
            raise ConfigurationError(
                "The pipeline seed must be an integer, got %r" % (self.seed,)
            )
        for key in ("jobs", "shard_size"):
            value = getattr(self, key)
            if not isinstance(value, int) or isinstance(value, bool) or value < 1:
                raise ConfigurationError(
                    "`%s` must be a positive integer, got %r" % (key, value)
                )
        for name in self.tokenizers.values():
            tokenization.get_tokenizer(name)
        for name, spec in self.translators.items():
            if not isinstance(spec, dict) or "type" not in spec:
                raise ConfigurationError(
                    "Translator %r needs a mapping with a `type`" % name
                )
            get_translator_for_name(spec["type"])
        seen = set()
        for stage in self.stages:
            if stage.name in seen:
                raise ConfigurationError(
                    "Stage name %r is used twice; give one a `name`" % stage.name
                )
            seen.add(stage.name)
            op = get_stage_op(stage.op, stage.name)
            count = len(stage.inputs)
            too_many = op.max_inputs is not None and count > op.max_inputs
            if count < op.min_inputs or too_many:
                raise ConfigurationError(
                    "Stage %r (%s) got %d inputs" % (stage.name, op.name, count)
                )
            if not stage.output:
                raise ConfigurationError("Stage %r has no `output`" % stage.name)
            unknown = set(stage.params) - op.params
            if unknown:
                raise ConfigurationError(
                    "Stage %r (%s) got unknown params: %s"
                    % (stage.name, op.name, ", ".join(sorted(unknown)))
                )
            missing = op.required - set(stage.params)
            if missing:
                raise ConfigurationError(
                    "Stage %r (%s) misses params: %s"
                    % (stage.name, op.name, ", ".join(sorted(missing)))
                )
            for key in op.translator_params:
                names = stage.params.get(key, [])
                for name in [names] if isinstance(names, str) else names:
                    if name not in self.translators:
                        raise ConfigurationError(
                            "Stage %r refers to undefined translator %r"
                            % (stage.name, name)
                        )

    def build_translators(self):
        translators = {}
        for name, spec in self.translators.items():
            kwargs = dict(spec)
            cls = get_translator_for_name(kwargs.pop("type"))
            for key in _TRANSLATOR_PATH_PARAMS:
                if isinstance(kwargs.get(key), str):
                    kwargs[key] = self.path(kwargs[key])
            try:
                translators[name] = cls(**kwargs)
            except TypeError as error:
                raise ConfigurationError(
                    "Invalid parameters for translator %r: %s" % (name, error)
                )
        return translators

    def __repr__(self):
        return "PipelineConfig(%d stages, seed=%r)" % (len(self.stages), self.seed)


class Manifest:
    """
    Record of a pipeline run. Contains no timestamps or absolute paths,
    so equal runs give equal manifests.
    """

    def __init__(self, seed, stages, *, tokenizers=None, version=__version__):
        self.seed = seed
        self.stages = list(stages)
        self.tokenizers = dict(tokenizers or {})
        self.version = version

    def as_dict(self):
        return {
            "toolkit": TOOLKIT,
            "version": self.version,
            "seed": self.seed,
            "tokenizers": dict(self.tokenizers),
            "stages": list(self.stages),
        }

    @classmethod
    def from_dict(cls, data):
        if data.get("toolkit") != TOOLKIT:
            raise ConfigurationError("Not a %s manifest" % TOOLKIT)
        return cls(
            data["seed"], data["stages"],
            tokenizers=data.get("tokenizers"), version=data.get("version"),
        )

    def dumps(self):
        return json.dumps(self.as_dict(), ensure_ascii=False, indent=2) + "\n"

    def save(self, path):
        _ensure_parent(path)
        with open(path, "w", encoding="utf-8", newline="\n") as f:
            f.write(self.dumps())

    @classmethod
    def load(cls, path):
        with open(path, encoding="utf-8") as f:
            return cls.from_dict(json.load(f))

    def digests(self):
        """
        Output path to sha256, over all stages.
        """
        return {
            item["path"]: item["sha256"]
            for stage in self.stages
            for item in stage["outputs"]
        }

    def __eq__(self, other):
        return isinstance(other, Manifest) and self.as_dict() == other.as_dict()

    def __ne__(self, other):
        return not (self == other)

    def __repr__(self):
        return "Manifest(%d stages, seed=%r)" % (len(self.stages), self.seed)


def resolve_config_path(path):
    """
    Return ``path`` if it exists, else the same relative path under
    :data:`CONFIG_DIR_ENV`.

    :raises bitextkit.exc.ConfigurationError: if neither exists.
    """
    path = os.fspath(path)
    if os.path.exists(path):
        return path
    config_dir = os.environ.get(CONFIG_DIR_ENV)
    if config_dir and not os.path.isabs(path):
        candidate = os.path.join(config_dir, path)
        if os.path.exists(candidate):
            return candidate
    raise ConfigurationError("Config file %r not found" % path)


def _ensure_parent(path):
    parent = os.path.dirname(os.fspath(path))
    if parent:
        os.makedirs(parent, exist_ok=True)


class _StageContext:

    def __init__(self, config, stage, seed, translators):
        self.config = config
        self.stage = stage
        self.seed = seed
        self.translators = translators
        self.params = stage.params
        # (path, kind) of files written besides the stage output
        self.extra_outputs = []
        self.details = {}

    def path(self, path):
        return self.config.path(path)

    @property
    def output(self):
        return self.path(self.stage.output)

    def input(self, index=0):
        return self.path(self.stage.inputs[index])

    def translator(self, key):
        return self.translators[self.params[key]]

    def translator_list(self, key):
        names = self.params[key]
        if isinstance(names, str):
            names = [names]
        return [self.translators[name] for name in names]

    def read_pairs(self, path):
        return read_records(path, guess_format(path))

    def write_pairs(self, records, path=None):
        path = self.output if path is None else path
        return write_records(records, path, guess_format(path))

    def sharded(self, func, records):
        if self.config.jobs == 1:
            return func(records)
        return ShardedMap(
            lambda shard: list(func(shard)),
            jobs=self.config.jobs,
            shard_size=self.config.shard_size,
        )(records)

    def write_json(self, data, path=None):
        path = self.output if path is None else path
        _ensure_parent(path)
        with open(path, "w", encoding="utf-8", newline="\n") as f:
            json.dump(data, f, ensure_ascii=False, indent=2, sort_keys=True)
            f.write("\n")


@stage_op("dedup")
def _dedup(ctx, stage):
    ctx.write_pairs(dedup(ctx.read_pairs(ctx.input())))


@stage_op("filter_chain", params=("filters", "config", "report"), path_params=("config",))
def _filter_chain(ctx, stage):
    if "filters" in ctx.params and "config" in ctx.params:
        raise ConfigurationError("Give either `filters` or `config`, not both")
    config = ctx.params.get("filters")
    if "config" in ctx.params:
        config = ctx.path(ctx.params["config"])
    stream, report = filter_chain(
        ctx.read_pairs(ctx.input()), config, base_dir=ctx.config.base_dir
    )
    ctx.write_pairs(stream)
    ctx.details["report"] = report.as_dict()
    if "report" in ctx.params:
        path = ctx.path(ctx.params["report"])
        ctx.write_json(report.as_dict(), path)
        ctx.extra_outputs.append((ctx.params["report"], FILE))


@stage_op("split_long", params=("lang",), required=("max_len",), inputs=MONO, output=MONO)
def _split_long(ctx, stage):
    lang = ctx.params.get("lang", "")
    write_mono(
        split_long(read_mono(ctx.input(), lang), ctx.params["max_len"]), ctx.output
    )


@stage_op("lid_train", params=("order", "k"), required=("langs",),
          inputs=MONO, output=FILE, max_inputs=None)
def _lid_train(ctx, stage):
    langs = ctx.params["langs"]
    if len(langs) != len(stage.inputs):
        raise ConfigurationError(
            "%d languages for %d inputs" % (len(langs), len(stage.inputs))
        )
    samples = {}
    for index, lang in enumerate(langs):
        samples[lang] = [s.text for s in read_mono(ctx.input(index), lang)]
    model = lid_train(
        samples,
        ctx.params.get("order", DEFAULT_SENTINEL),
        ctx.params.get("k", DEFAULT_SENTINEL),
    )
    model.save(ctx.output)


@stage_op("ibm1_train", params=("iterations",), output=FILE)
def _ibm1_train(ctx, stage):
    table = ibm1_train(
        ctx.read_pairs(ctx.input()), ctx.params.get("iterations", DEFAULT_SENTINEL)
    )
    table.save(ctx.output)
    ctx.details["log_likelihoods"] = list(table.log_likelihoods)


def _corpus_sentences(ctx, path):
    """
    Sentences of a corpus file: both sides of a record file, or the lines
    of a monolingual one.
    """
    if os.fspath(path).endswith(_RECORD_SUFFIXES):
        for pair in ctx.read_pairs(path):
            yield pair.src
            yield pair.tgt
    else:
        yield from read_mono(path)


@stage_op("bpe_learn", params=("min_frequency",), required=("num_merges",),
          inputs=RECORDS, output=FILE, max_inputs=None)
def _bpe_learn(ctx, stage):
    corpora = [
        _corpus_sentences(ctx, ctx.input(i)) for i in range(len(stage.inputs))
    ]
    model = bpe_learn(
        corpora,
        ctx.params["num_merges"],
        min_frequency=ctx.params.get("min_frequency", 2),
    )
    model.save(ctx.output)
    ctx.details["merges"] = len(model)


def _segment_pair(model, pair):
    return SentencePair(
        Sentence(bpe_apply_text(model, pair.src), pair.src.lang),
        Sentence(bpe_apply_text(model, pair.tgt), pair.tgt.lang),
        pair.provenance,
        pair.scores,
    )


@stage_op("bpe_apply", required=("model",), path_params=("model",))
def _bpe_apply(ctx, stage):
    model = BpeModel.load(ctx.path(ctx.params["model"]))
    ctx.write_pairs(
        ctx.sharded(
            lambda pairs: (_segment_pair(model, pair) for pair in pairs),
            ctx.read_pairs(ctx.input()),
        )
    )


@stage_op("lm_train", params=("order", "k", "side"), output=FILE)
def _lm_train(ctx, stage):
    path = ctx.input()
    side = ctx.params.get("side", "tgt")
    if side not in ("src", "tgt"):
        raise ConfigurationError("`side` must be 'src' or 'tgt', got %r" % (side,))
    if path.endswith(_RECORD_SUFFIXES):
        corpus = (getattr(pair, side) for pair in ctx.read_pairs(path))
    else:
        corpus = read_mono(path)
    lm = lm_train(corpus, ctx.params.get("order", 3), ctx.params.get("k", 1.0))
    lm.save(ctx.output)


@stage_op("bit")
def _bit(ctx, stage):
    ctx.write_pairs(bit_reconstruct(ctx.read_pairs(ctx.input())))


def _beam_spec(ctx):
    if "width" in ctx.params:
        return DecodeSpec.beam(ctx.params["width"])
    return None


@stage_op("dd", params=("dedup", "width"), required=("fwd", "bwd"),
          translator_params=("fwd", "bwd"))
def _dd(ctx, stage):
    fwd, bwd = ctx.translator_list("fwd"), ctx.translator_list("bwd")
    spec = _beam_spec(ctx)
    pairs = ctx.read_pairs(ctx.input())
    if ctx.params.get("dedup", False):
        stream = dd_generate(pairs, fwd, bwd, spec=spec, dedup=True)
    else:
        stream = ctx.sharded(
            lambda shard: dd_generate(shard, fwd, bwd, spec=spec), pairs
        )
    ctx.write_pairs(stream)


@stage_op("ft", params=("width",), required=("teacher", "sample_size"),
          inputs=MONO, translator_params=("teacher",))
def _ft(ctx, stage):
    teacher = ctx.translator("teacher")
    ctx.write_pairs(
        ft_generate(
            read_mono(ctx.input(), teacher.src_lang),
            teacher,
            ctx.params["sample_size"],
            ctx.seed,
            spec=_beam_spec(ctx),
        )
    )


@stage_op("bt", params=("mode", "tagged", "tag", "width", "temperature"),
          required=("reverse",), inputs=MONO, translator_params=("reverse",))
def _bt(ctx, stage):
    reverse = ctx.translator("reverse")
    kwargs = {
        "mode": ctx.params.get("mode", "beam"),
        "tagged": ctx.params.get("tagged", False),
        "tag": ctx.params.get("tag", DEFAULT_SENTINEL),
        "seed": ctx.seed,
        "width": ctx.params.get("width", DEFAULT_SENTINEL),
        "temperature": ctx.params.get("temperature", DEFAULT_SENTINEL),
    }
    ctx.write_pairs(
        ctx.sharded(
            lambda shard: bt_generate(shard, reverse, **kwargs),
            read_mono(ctx.input(), reverse.src_lang),
        )
    )


@stage_op("tel", params=("dedup", "width"), required=("models",), inputs=MONO,
          translator_params=("models",))
def _tel(ctx, stage):
    models = ctx.translator_list("models")
    ctx.write_pairs(
        tel_build(
            read_mono(ctx.input(), models[0].src_lang),
            models,
            spec=_beam_spec(ctx),
            dedup=ctx.params.get("dedup", False),
        )
    )


@stage_op("at_schedule", params=("passes",), required=("rounds",),
          output=FILE, max_inputs=None)
def _at_schedule(ctx, stage):
    authentic, synthetic = stage.inputs[0], stage.inputs[1:]
    schedule = at_schedule(
        ctx.config.relpath(authentic),
        [ctx.config.relpath(path) for path in synthetic],
        ctx.params["rounds"],
        passes=ctx.params.get("passes", 1),
        base_dir=ctx.config.base_dir,
    )
    schedule.save(ctx.output)


@stage_op("bit_schedule", params=("passes",), output=FILE, min_inputs=2, max_inputs=2)
def _bit_schedule(ctx, stage):
    passes = ctx.params.get("passes", (1, 1))
    if len(passes) != 2:
        raise ConfigurationError("`passes` needs two values, got %r" % (passes,))
    schedule = bit_schedule(
        ctx.config.relpath(stage.inputs[0]),
        ctx.config.relpath(stage.inputs[1]),
        passes=tuple(passes),
        base_dir=ctx.config.base_dir,
    )
    schedule.save(ctx.output)


def _scorer(ctx, lm_key, table):
    lm = NgramLM.load(ctx.path(ctx.params[lm_key]))
    if table is None:
        return LanguageModelScorer(lm)
    return ChannelScorer(table, lm)


@stage_op("curriculum_score", params=("in_lm", "out_lm", "table", "scores"),
          path_params=("in_lm", "out_lm", "table", "scores"))
def _curriculum_score(ctx, stage):
    pairs = ctx.read_pairs(ctx.input())
    if "scores" in ctx.params:
        if {"in_lm", "out_lm", "table"} & set(ctx.params):
            raise ConfigurationError("Give either `scores` or language models, not both")
        scores = load_external_scores(ctx.path(ctx.params["scores"]))
        ctx.write_pairs(attach_external_scores(pairs, scores))
        return
    if not {"in_lm", "out_lm"} <= set(ctx.params):
        raise ConfigurationError("Scoring needs `in_lm` and `out_lm`, or `scores`")
    table = None
    if "table" in ctx.params:
        table = TranslationTable.load(ctx.path(ctx.params["table"]))
    in_scorer = _scorer(ctx, "in_lm", table)
    out_scorer = _scorer(ctx, "out_lm", table)
    ctx.write_pairs(
        ctx.sharded(lambda shard: score_pairs(shard, in_scorer, out_scorer), pairs)
    )


@stage_op("curriculum_bins", params=("bins", "phases", "weights"), output=FILE)
def _curriculum_bins(ctx, stage):
    bins = build_bins(
        ctx.read_pairs(ctx.input()),
        ctx.params.get("bins", DEFAULT_BINS),
        weights=ctx.params.get("weights"),
        phases=ctx.params.get("phases", DEFAULT_PHASES),
    )
    bins.save(ctx.output)
    ctx.details["bins"] = bins.describe()


@stage_op("curriculum_sample", params=("epoch_coverage",),
          required=("phase", "batch_size", "num_batches"), inputs=FILE)
def _curriculum_sample(ctx, stage):
    bins = CurriculumBins.load(ctx.input())
    batches = cl_sample(
        bins,
        ctx.params["phase"],
        ctx.params["batch_size"],
        ctx.seed,
        num_batches=ctx.params["num_batches"],
        epoch_coverage=ctx.params.get("epoch_coverage", False),
    )
    with open(ctx.output, "w", encoding="utf-8", newline="\n") as f:
        for index, batch in enumerate(batches):
            f.write(json.dumps({"batch": index, "indices": batch}))
            f.write("\n")


_QUALITY_ESTIMATORS = {
    "length_ratio": lambda key: LengthRatioQE(),
    "stored": StoredScoreQE,
}


@stage_op("hypo_build", params=("qe", "qe_key", "threshold", "n", "sft", "template"),
          required=("base",), translator_params=("base",))
def _hypo_build(ctx, stage):
    qe_name = ctx.params.get("qe", "stored")
    if qe_name not in _QUALITY_ESTIMATORS:
        raise ConfigurationError(
            "Unknown quality estimator %r; options are: %s"
            % (qe_name, sorted(_QUALITY_ESTIMATORS))
        )
    qe = _QUALITY_ESTIMATORS[qe_name](ctx.params.get("qe_key", "qe"))
    records = list(hypo_build(
        ctx.read_pairs(ctx.input()),
        ctx.translator("base"),
        qe,
        ctx.params.get("threshold", DEFAULT_QE_THRESHOLD),
        ctx.params.get("n", DEFAULT_NBEST),
    ))
    write_ape_records(records, ctx.output)
    if "sft" in ctx.params:
        write_sft(
            records,
            ctx.path(ctx.params["sft"]),
            ctx.params.get("template", DEFAULT_TEMPLATE),
        )
        ctx.extra_outputs.append((ctx.params["sft"], RECORDS))


@stage_op("stats", params=("ratio_bucket_width",), output=FILE)
def _stats(ctx, stage):
    stats = compute_stats(
        ctx.read_pairs(ctx.input()),
        ratio_bucket_width=ctx.params.get("ratio_bucket_width", 0.5),
    )
    ctx.write_json(stats.as_dict())


def _describe_file(config, path, kind):
    full = config.path(path)
    return {
        "path": config.relpath(path),
        "sha256": file_digest(full),
        "records": count_lines(full) if kind in (RECORDS, MONO) else None,
    }


def _run_stage(config, stage, translators):
    op = STAGE_OPS[stage.op]
    seed = derive_seed(config.seed, stage.name)
    ctx = _StageContext(config, stage, seed, translators)
    logger.info("Stage %r (%s) started", stage.name, op.name)
    try:
        inputs = [_describe_file(config, path, op.inputs) for path in stage.inputs]
        inputs.extend(
            _describe_file(config, stage.params[key], FILE)
            for key in op.path_params if key in stage.params
        )
        _ensure_parent(ctx.output)
        op.func(ctx, stage)
        outputs = [_describe_file(config, stage.output, op.output)]
        outputs.extend(
            _describe_file(config, path, kind) for path, kind in ctx.extra_outputs
        )
    except Exception as error:
        raise StageError(
            "Stage %r (%s) failed: %s" % (stage.name, op.name, error),
            stage=stage.name,
        ) from error
    logger.info(
        "Stage %r (%s) finished: %s", stage.name, op.name,
        ", ".join(
            "%s (%s records)" % (item["path"], item["records"]) for item in outputs
        ),
    )
    entry = {
        "name": stage.name,
        "op": op.name,
        "seed": seed,
        "params": dict(stage.params),
        "inputs": inputs,
        "outputs": outputs,
    }
    entry.update(ctx.details)
    return entry


def run_pipeline(config_path, *, jobs=None, manifest_path=None):
    """
    Run every stage of a pipeline config in order and write its manifest.

    :param config_path: YAML config path, or a :class:`PipelineConfig`.
    :param int jobs: Overrides the config's ``jobs``. Outputs don't depend
        on it.
    :param manifest_path: Overrides the config's ``manifest``.
    :rtype: :class:`Manifest`
    :raises bitextkit.exc.ConfigurationError: for an invalid config; no
        stage has run.
    :raises bitextkit.exc.StageError: when a stage fails; later stages
        don't run and no manifest is written.
    """
    if isinstance(config_path, PipelineConfig):
        config = config_path
    else:
        config = PipelineConfig.load(config_path)
    if jobs is not None:
        config.jobs = jobs
        config.validate()
    translators = config.build_translators()
    saved = dict(tokenization.options.language_tokenizers)
    tokenization.options.language_tokenizers = dict(saved, **config.tokenizers)
    try:
        entries = [
            _run_stage(config, stage, translators) for stage in config.stages
        ]
        effective = dict(tokenization.options.language_tokenizers)
        effective["default"] = tokenization.options.default_tokenizer
    finally:
        tokenization.options.language_tokenizers = saved
    manifest = Manifest(config.seed, entries, tokenizers=effective)
    path = config.path(manifest_path if manifest_path is not None else config.manifest)
    manifest.save(path)
    logger.info("Wrote manifest of %d stages to %s", len(entries), path)
    return manifest
