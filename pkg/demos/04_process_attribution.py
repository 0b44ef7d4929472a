"""
Attributing physical offsets to processes
=========================================

A finding at physical offset 0x1a3c is far more useful once it reads
"inside firefox.exe at virtual 0x0040 1a3c".  A process map lists which
physical ranges each process owned at acquisition time; lookups walk
that table and translate offsets into per-process virtual addresses.
"""

from memsift import (
    MemoryImage,
    ProcessMap,
    ProcessMapEntry,
    scan_image,
)

# ranges are half-open [start, end); overlaps are legal because shared
# pages really do belong to several processes at once
pmap = ProcessMap((
    ProcessMapEntry(4, "System", 0x0000, 0x4000, 0x80000000),
    ProcessMapEntry(1532, "firefox.exe", 0x4000, 0x20000, 0x00400000),
    ProcessMapEntry(2210, "chrome.exe", 0x20000, 0x40000, 0x01000000),
    ProcessMapEntry(2211, "chrome.exe", 0x3c000, 0x40000, 0x02000000),
))

for off in (0x1000, 0x5000, 0x3d000, 0x50000):
    owners = pmap.lookup(off)
    if not owners:
        print(f"0x{off:05x}: no owner (unmapped or freed)")
    else:
        names = ", ".join(
            f"{a.process_name}[{a.pid}] virt=0x{a.virtual_address:08x}"
            for a in owners
        )
        print(f"0x{off:05x}: {names}")

# the scanner threads the same lookup through every finding
image = bytearray(256 * 1024)
body = b"userName=ipsita689&password=durga21&submit=LOGIN"
image[0x5000 : 0x5000 + len(body)] = body
url = b"https://www.irctc.co.in/cgi-bin/login"
image[0x5100 : 0x5100 + len(url)] = url

img = MemoryImage.from_bytes(bytes(image), label="demo")
for f in scan_image(img, process_map=pmap):
    for a in f.attributions:
        print(f"\nfinding {f.app_id}/{f.username} attributed to "
              f"{a.process_name}[{a.pid}] at virt 0x{a.virtual_address:08x}")
