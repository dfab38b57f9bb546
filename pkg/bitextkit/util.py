import hashlib
import logging

__version__ = "1.0.0"
__version_info__ = (1, 0, 0)

logger = logging.getLogger('bitextkit')

# Create an object which `repr` returns 'DEFAULT_SENTINEL'. Sphinx (docs) uses
# this value when generating method's signature.
DEFAULT_SENTINEL = type('object', (object,),
                        {'__repr__': lambda self: 'DEFAULT_SENTINEL'})()


def resolve_option(value, default):
    """
    Return ``value`` unless it is :data:`DEFAULT_SENTINEL`, in which case
    ``default`` is returned.
    """
    return default if value is DEFAULT_SENTINEL else value


def derive_seed(root_seed, *labels):
    """
    Expand a root seed into a child seed for the given labels.

    The derivation only depends on ``root_seed`` and ``labels``, so adding a
    stage to a pipeline doesn't perturb the seeds of its siblings::

        >>> derive_seed(13, "ft") == derive_seed(13, "ft")
        True

    :param int root_seed: Root seed.
    :param labels: Strings (or anything with a stable ``str``) naming
        the consumer of the seed.
    :rtype: int
    :return: A non-negative 63-bit integer.
    """
    h = hashlib.sha256(str(int(root_seed)).encode("ascii"))
    for label in labels:
        h.update(b"\x1f")
        h.update(str(label).encode("utf-8"))
    return int.from_bytes(h.digest()[:8], "big") >> 1


def file_digest(path, chunk_size=1 << 20):
    """
    sha256 hex digest of a file's bytes.
    """
    h = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(chunk_size), b""):
            h.update(chunk)
    return h.hexdigest()


def get_version():
    return __version__
