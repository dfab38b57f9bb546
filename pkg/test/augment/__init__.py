from bitextkit.exc import TranslationError
from bitextkit.sentence import NBestList
from bitextkit.translators import Translator


class FailingTranslator(Translator):
    """Raises for the sources listed in ``fail_on``, copies the others."""

    def __init__(self, fail_on=(), **kwargs):
        super().__init__(**kwargs)
        self.fail_on = set(fail_on)

    def translate(self, source, spec=None, n=1):
        source, spec = self._coerce(source, spec, n)
        if source.text in self.fail_on:
            raise TranslationError("can't translate %r" % source.text)
        return NBestList(source, [(source.text.upper(), 0.0)])
