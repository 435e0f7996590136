"""
Key files and ciphertext files
==============================

Everything the CLI does, from Python: write a key, encrypt bytes into a
framed ciphertext, read it back and decrypt.
"""

import tempfile
from pathlib import Path

from baptista import Partition, Scheme, generate_key, read_ciphertext, read_key_file, write_ciphertext, write_key_file
from baptista.ciphers import Variant, decipher, encipher
from baptista.keys import format_key

tmp = Path(tempfile.mkdtemp())
key = generate_key(2024)
write_key_file(tmp / "demo.key", key)
print(format_key(key))

key = read_key_file(tmp / "demo.key")
part = Partition.for_key(key)
plain = b"Iterate until the orbit lands in the right interval, then count."

for scheme in (Scheme.RECTIFIED_VARLEN, Scheme.RECTIFIED_COMPRESSED, Scheme.ORIGINAL_FIXED):
    variant = Variant.ORIGINAL if scheme is Scheme.ORIGINAL_FIXED else Variant.RECTIFIED
    tr = encipher(variant, key, part, plain)
    blob = write_ciphertext(tr.units, key, scheme)
    header, units = read_ciphertext(blob, key)
    back = bytes(decipher(variant, key, part, units).symbols.astype("uint8"))
    print(f"{scheme.name:<22} {len(blob):>5} bytes for {len(plain)} characters, round trip {back == plain}")

print("\nfirst units:", tr.units[:5])
