#!/usr/bin/env python3
"""Differential half of the round-trip gate: decode the corpus written by
diff_check with an independent QR decoder and compare payloads.

OpenCV's quirc-based detector is flaky with respect to absolute symbol size,
so each symbol gets a few rescaled attempts. A wrong (non-empty) payload at
any scale is always a failure; that would indicate an encoding bug rather
than a detector miss.

Usage: diff_check.py [corpus_dir]
"""
import sys

import cv2

SCALES = (1.0, 0.9, 1.1, 0.75, 1.25, 1.5, 0.5)

def decode_with_retries(detector, image, expected):
    saw_wrong = None
    for s in SCALES:
        attempt = image if s == 1.0 else cv2.resize(
            image, None, fx=s, fy=s, interpolation=cv2.INTER_NEAREST)
        decoded, _, _ = detector.detectAndDecode(attempt)
        if decoded == expected:
            return True, None
        if decoded:
            saw_wrong = decoded
    return False, saw_wrong

def main() -> int:
    corpus = sys.argv[1] if len(sys.argv) > 1 else "diff_corpus"
    detector = cv2.QRCodeDetector()
    total = ok = 0
    wrong_payloads = 0
    with open(f"{corpus}/expected.txt", encoding="utf-8") as fh:
        for line in fh:
            name, expected = line.rstrip("\n").split("\t", 1)
            image = cv2.imread(f"{corpus}/{name}", cv2.IMREAD_GRAYSCALE)
            total += 1
            good, wrong = decode_with_retries(detector, image, expected)
            if good:
                ok += 1
            elif wrong is not None:
                wrong_payloads += 1
                print(f"WRONG PAYLOAD {name}: got {wrong!r} want {expected!r}")
            else:
                print(f"UNDETECTED {name}: want {expected!r}")
    print(f"differential: {ok}/{total} round-trips agree, {wrong_payloads} wrong payloads")
    return 0 if ok == total and wrong_payloads == 0 else 1

if __name__ == "__main__":
    sys.exit(main())
