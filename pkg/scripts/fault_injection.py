"""Corrupt valid certificates one entry at a time and report detection."""
import random
import sys

from nullwidth.certify import FAULT_TARGETS, build_certificate, generate_instance, inject_fault, verify_certificate

rng = random.Random(2024)
hits = total = 0
for L in (1, 2):
    for seed in range(5):
        cert = build_certificate(generate_instance(L, seed))
        for kind, identity in FAULT_TARGETS.items():
            report = verify_certificate(inject_fault(cert, kind, rng))
            ok = not report.passed and identity in report.failed
            hits += ok
            total += 1
            print(f"L={L} seed={seed} {kind:6s} detected={ok} failed={','.join(report.failed)}")
print(f"{hits}/{total} faults detected")
sys.exit(0 if hits == total else 1)
