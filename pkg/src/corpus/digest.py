import hashlib


def calculate_content_hash(content):
    """
    Calculate SHA-256 hash of the given content.

    Args:
        content (str | bytes): Content to hash.

    Returns:
        str: Hexadecimal SHA-256 hash.
    """
    if isinstance(content, str):
        content = content.encode("utf-8")
    return hashlib.sha256(content).hexdigest()


def calculate_file_hash(path, chunk_size=1 << 20):
    digest = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(chunk_size), b""):
            digest.update(chunk)
    return digest.hexdigest()


def derive_seed(seed, *keys):
    """
    Derive an independent 63-bit seed from a base seed and string keys.

    Adding a user or document never changes the seed of another one.
    """
    material = "\x1f".join([str(seed), *map(str, keys)])
    return int(calculate_content_hash(material)[:16], 16) >> 1
