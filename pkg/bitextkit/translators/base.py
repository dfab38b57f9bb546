import enum
import hashlib

from bitextkit.exc import ConfigurationError, ScoreError
from bitextkit.sentence import Sentence
from bitextkit.util import DEFAULT_SENTINEL, resolve_option

__all__ = (
    "DecodeMode",
    "DecodeSpec",
    "Scorer",
    "Translator",
    "options",
    "source_digest",
)


class options:
    """The `options` object contains default configuration values for
    translators and scorers.

    Example for making back-translation use a different tag and wider
    beams by default::

        >>> import bitextkit.translators
        >>> bitextkit.translators.options.default_bt_tag = "<SYN>"
        >>> bitextkit.translators.options.default_beam_width = 8

    Note that the tag has to be registered as a protected token
    (:attr:`bitextkit.tokenization.options.protected_tokens`) to survive
    tokenization and BPE intact.

    Attributes:
        default_beam_width
            Beam width of :class:`DecodeSpec` when none is given.

        default_bt_tag
            Token prepended to tagged back-translated sources.

        default_floor
            Probability used in place of zero by scorers and language
            models, so every log-probability is finite.

        default_temperature
            Sampling temperature of :class:`DecodeSpec`.
    """

    # Please keep the attributes sorted and make sure that each attr has
    # a corresponding section in the docstring above.
    default_beam_width = 4
    default_bt_tag = "<BT>"
    default_floor = 1e-12
    default_temperature = 1.0


class DecodeMode(enum.Enum):
    BEAM = "beam"
    SAMPLING = "sampling"

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise ConfigurationError(
                "Unknown decode mode %r; options are: beam, sampling" % (value,)
            )


class DecodeSpec:
    """
    How a translator decodes.

    ``BEAM`` keeps the ``width`` best partial hypotheses. ``SAMPLING`` draws
    ``width`` samples from the temperature-scaled output distributions; the
    random stream depends only on ``seed`` and the source text.
    """

    __slots__ = ("mode", "width", "temperature", "seed")

    def __init__(
            self,
            mode=DecodeMode.BEAM,
            width=DEFAULT_SENTINEL,
            temperature=DEFAULT_SENTINEL,
            seed=0
    ):
        """
        :param mode: :class:`DecodeMode` or its name.

        :param int width: Beam width or number of samples, default
            :attr:`bitextkit.translators.options.default_beam_width`.

        :param float temperature: Sampling temperature, default
            :attr:`bitextkit.translators.options.default_temperature`.

        :param int seed: Sampling seed.
        """
        self.mode = DecodeMode.parse(mode)
        self.width = int(resolve_option(width, options.default_beam_width))
        self.temperature = float(
            resolve_option(temperature, options.default_temperature)
        )
        self.seed = int(seed)
        if self.width < 1:
            raise ConfigurationError("Decode width must be >= 1, got %r" % width)
        if not self.temperature > 0:
            raise ConfigurationError(
                "Sampling temperature must be > 0, got %r" % temperature
            )

    @classmethod
    def beam(cls, width=DEFAULT_SENTINEL):
        return cls(DecodeMode.BEAM, width)

    @classmethod
    def sampling(cls, samples=1, *, temperature=DEFAULT_SENTINEL, seed=0):
        return cls(DecodeMode.SAMPLING, samples, temperature, seed)

    def as_dict(self):
        return {
            "mode": self.mode.value,
            "width": self.width,
            "temperature": self.temperature,
            "seed": self.seed,
        }

    def __eq__(self, other):
        return isinstance(other, DecodeSpec) and self.as_dict() == other.as_dict()

    def __repr__(self):
        return "DecodeSpec(%s, width=%d, temperature=%r, seed=%d)" % (
            self.mode.name, self.width, self.temperature, self.seed
        )


def source_digest(text):
    """
    A 64-bit integer digest of a source text, mixed into sampling seeds.
    """
    return int.from_bytes(
        hashlib.sha256(text.encode("utf-8")).digest()[:8], "big"
    )


class Translator:
    """
    Template object for translators.

    Implementations must be deterministic given the source and the
    :class:`DecodeSpec` (seed included), return at most ``n`` hypotheses
    sorted by log-probability and be safe to call concurrently.
    """

    def __init__(self, *, src_lang="", tgt_lang=""):
        self.src_lang = src_lang
        self.tgt_lang = tgt_lang

    def translate(self, source, spec=None, n=1):
        """
        Return an n-best list for ``source``.

        :param source: :class:`bitextkit.sentence.Sentence` or str.

        :param spec: :class:`DecodeSpec`; a default beam when ``None``.

        :param int n: Maximum number of hypotheses.

        :rtype: :class:`bitextkit.sentence.NBestList`
        """
        raise NotImplementedError()

    def one_best(self, source, spec=None):
        """
        Text of the best hypothesis.
        """
        return self.translate(source, spec, 1).best.text

    def _coerce(self, source, spec, n):
        if not isinstance(source, Sentence):
            source = Sentence(source, self.src_lang)
        if spec is None:
            spec = DecodeSpec()
        if n < 1:
            raise ConfigurationError("n must be >= 1, got %r" % n)
        return source, spec

    def __repr__(self):
        return "%s(src_lang=%r, tgt_lang=%r)" % (
            type(self).__name__, self.src_lang, self.tgt_lang
        )


class Scorer:
    """
    Template object for scorers: ``logprob(src, tgt)`` is the natural-log
    probability of the target given the source, joint over target tokens.
    Implementations floor probabilities so the result is finite.
    """

    def logprob(self, src, tgt):
        raise NotImplementedError()

    def score_pair(self, pair):
        return self.logprob(pair.src, pair.tgt)

    @staticmethod
    def _target_tokens(tgt):
        if not isinstance(tgt, Sentence):
            tgt = Sentence(tgt)
        tokens = tgt.tokens
        if not tokens:
            raise ScoreError("Can't score an empty target sentence")
        return tokens

    def __repr__(self):
        return "%s()" % type(self).__name__
