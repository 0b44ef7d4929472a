"""
Decoding recovered password values
==================================

What a browser leaves in memory is not always the literal password.
Form-urlencoded submissions percent-escape punctuation, and some sites
encrypt the password client-side before it ever reaches the wire.  The
decoder layer sorts recovered values into those three cases.
"""

from memsift import ValueEncoding, classify_value, percent_decode

# percent-escapes: %2C is a comma, %3B a semicolon, %21 a bang
print(percent_decode("who678%2C%3B"), "<- who678%2C%3B")
print(percent_decode("abc*%21123"), "<- abc*%21123")

# in form bodies a '+' means space; outside them it is a literal plus
print(percent_decode("new+delhi", plus_as_space=True), "<- form body")
print(percent_decode("new+delhi"), "<- bare value")

# malformed escapes survive untouched rather than raising
print(percent_decode("50%off"), "<- '%of' is not a valid escape")

# classify_value applies the catalog's declared encoding and also flags
# values that look like ciphertext (32 hex chars) even when the catalog
# expected plaintext
for raw, enc in [
    ("who678%2C%3B", ValueEncoding.PERCENT),
    ("durga21", ValueEncoding.PLAINTEXT),
    ("37f08c5d00de89cb3c26e50200ee7242", ValueEncoding.PLAINTEXT),
]:
    v = classify_value(raw, enc)
    tag = "ENCRYPTED, kept verbatim" if v.encrypted else f"decoded={v.decoded!r}"
    print(f"{raw:35s} -> {v.classification}: {tag}")
