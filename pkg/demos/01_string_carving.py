"""
Carving printable strings out of raw bytes
==========================================

Memory images are mostly binary noise with human-readable fragments
scattered through it.  The carver pulls out every maximal printable run,
in plain ASCII and in UTF-16LE, and remembers where each one came from.
"""

import numpy as np

from memsift import Encoding, carve_strings

# build a toy "memory image": random bytes with two readable islands
rng = np.random.default_rng(7)
buf = bytearray(rng.integers(0, 256, 4096, dtype=np.uint8).tobytes())

login = b"\x00userLogin.html?uName=306110003\x00"  # NUL fenced
buf[100 : 100 + len(login)] = login
wide = "https://accounts.google.com".encode("utf-16-le")
buf[2000 : 2000 + len(wide)] = wide

# carve.  every hit carries its offset, text, and encoding.
print("carved strings of 8+ characters:")
for s in carve_strings(bytes(buf), min_len=8):
    print(f"  0x{s.offset:04x}  {s.encoding.value:8s}  {s.text!r}")

# the stream is chunk-size independent: reading the image 256 bytes at a
# time or all at once yields byte-for-byte the same result.
whole = list(carve_strings(bytes(buf), min_len=8))
chunked = list(carve_strings(bytes(buf), min_len=8, chunk_size=256))
print("\nchunked read identical:", whole == chunked)

# UTF-16LE runs are found at any byte alignment; offsets are byte offsets
# into the image, so a 27-character wide string covers 54 bytes.
wide_hits = [s for s in whole if s.encoding is Encoding.UTF16LE]
print("wide string byte length:", wide_hits[0].byte_length)
