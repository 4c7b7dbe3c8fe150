"""Content-addressed file cache for coset representative tables.

Enumerating the single cosets inside a double coset is the dominant
cost of the convolution oracle, and the result depends only on
(n, q, w).  Tables are therefore stored one file per key, in a binary
format tight enough to compare byte for byte across runs: the
determinism audit hashes these files.

Layout of a table file:

    magic "HKF1"
    header  n, q (one byte each), then the length-prefixed canonical
            encoding of w
    body    representative count, then one length-prefixed matrix
            encoding per representative
    footer  sha256 of everything above

A matrix encodes its cells row by row; each cell is a reduced rational
function, stored as the two coefficient strings of numerator and
denominator.  Cells come straight from the group's arithmetic, which
keeps them in canonical reduced form, so identical tables produce
identical bytes.

A reader that finds anything unexpected (truncation, bad magic, bad
hash, stray key) reports a miss; the caller recomputes and the fresh
table overwrites the bad file through an atomic rename.
"""

import hashlib
import os
import struct
import tempfile

MAGIC = b"HKF1"

_U8 = struct.Struct("<B")
_U16 = struct.Struct("<H")
_U32 = struct.Struct("<I")
_I16 = struct.Struct("<h")


def encode_weyl(w):
    """Canonical bytes for an extended Weyl element (perm, lam, torus).

    >>> encode_weyl(((1, 0), (2, -1), (1, 1))).hex()
    '0201000200ffff0101'
    """
    perm, lam, torus = w
    n = len(perm)
    out = [_U8.pack(n)]
    out += [_U8.pack(p) for p in perm]
    out += [_I16.pack(x) for x in lam]
    out += [_U8.pack(c) for c in torus]
    return b"".join(out)


def _encode_cell(cell):
    num, den = cell
    if len(num) > 0xFFFF or len(den) > 0xFFFF:
        raise ValueError("coefficient string too long to encode")
    return (_U16.pack(len(num)) + bytes(num)
            + _U16.pack(len(den)) + bytes(den))


def _encode_matrix(g):
    return b"".join(_encode_cell(c) for row in g for c in row)


def _decode_matrix(blob, n, q):
    cells = []
    pos = 0
    for _ in range(n * n):
        (ln,) = _U16.unpack_from(blob, pos)
        pos += 2
        num = tuple(blob[pos:pos + ln])
        pos += ln
        (ld,) = _U16.unpack_from(blob, pos)
        pos += 2
        den = tuple(blob[pos:pos + ld])
        pos += ld
        if not den or any(c >= q for c in num + den):
            raise ValueError("cell out of range")
        cells.append((num, den))
    if pos != len(blob):
        raise ValueError("trailing bytes in matrix")
    return tuple(tuple(cells[i * n + j] for j in range(n))
                 for i in range(n))


def _header(LG, w):
    wenc = encode_weyl(w)
    return (MAGIC + _U8.pack(LG.n) + _U8.pack(LG.q)
            + _U32.pack(len(wenc)) + wenc)


def table_path(cache_dir, LG, w):
    """File name for the (n, q, w) key: a digest of the header, so the
    name commits to the full key and nothing else."""
    tag = hashlib.sha256(_header(LG, w)).hexdigest()[:32]
    return os.path.join(cache_dir, tag + ".hkf")


def encode_table(LG, w, reps):
    head = _header(LG, w)
    parts = [head, _U32.pack(len(reps))]
    for g in reps:
        m = _encode_matrix(g)
        parts.append(_U32.pack(len(m)))
        parts.append(m)
    body = b"".join(parts)
    return body + hashlib.sha256(body).digest()


def decode_table(LG, w, blob):
    """Representative list back from bytes; None on any defect."""
    if len(blob) < 32:
        return None
    body, digest = blob[:-32], blob[-32:]
    if hashlib.sha256(body).digest() != digest:
        return None
    head = _header(LG, w)
    if not body.startswith(head):
        return None
    pos = len(head)
    try:
        (count,) = _U32.unpack_from(body, pos)
        pos += 4
        reps = []
        for _ in range(count):
            (ln,) = _U32.unpack_from(body, pos)
            pos += 4
            reps.append(_decode_matrix(body[pos:pos + ln], LG.n, LG.q))
            pos += ln
    except (struct.error, ValueError, IndexError):
        return None
    if pos != len(body):
        return None
    return reps


def cache_coset_table(cache_dir, LG, w, reps):
    """Store a table under its key.  Writes go to a private temporary
    file first; the rename is atomic, so concurrent writers of the same
    key leave one whole file, never an interleaving."""
    os.makedirs(cache_dir, exist_ok=True)
    path = table_path(cache_dir, LG, w)
    blob = encode_table(LG, w, reps)
    fd, tmp = tempfile.mkstemp(dir=cache_dir, suffix=".part")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(blob)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise
    return path


def load_coset_table(cache_dir, LG, w):
    """The stored table for (n, q, w), or None on miss or corruption."""
    path = table_path(cache_dir, LG, w)
    try:
        with open(path, "rb") as fh:
            blob = fh.read()
    except OSError:
        return None
    return decode_table(LG, w, blob)


class CosetTableStore:
    """Mapping facade over the file cache, shaped for the convolution
    oracle's reps_cache protocol: membership probes the disk, missing
    entries get computed by the caller and written through.

    With no directory it degrades to a per-run dictionary.
    """

    def __init__(self, LG, cache_dir=None):
        self.LG = LG
        self.cache_dir = cache_dir
        self._mem = {}
        self.hits = 0
        self.misses = 0

    def __contains__(self, w):
        if w in self._mem:
            return True
        if self.cache_dir is not None:
            reps = load_coset_table(self.cache_dir, self.LG, w)
            if reps is not None:
                self._mem[w] = reps
                self.hits += 1
                return True
        self.misses += 1
        return False

    def __getitem__(self, w):
        return self._mem[w]

    def __setitem__(self, w, reps):
        reps = [self.LG.mat(g) for g in reps]
        self._mem[w] = reps
        if self.cache_dir is not None:
            cache_coset_table(self.cache_dir, self.LG, w, reps)
