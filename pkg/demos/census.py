"""Count minimal Taylor clones on two elements, then run a short resumable
search on three.

    python3 demos/census.py [budget]
"""

import os
import sys
import tempfile

from taylorlab.catalogue import enumerate_minimal_taylor


def main(budget=200):
    two = enumerate_minimal_taylor(2)
    print(f"two elements: {two.clone_count} clones, {two.class_count} up to relabeling")
    for form in two.forms:
        print("  ", form.key, "orbit", form.orbit)

    with tempfile.TemporaryDirectory() as tmp:
        ck = os.path.join(tmp, "census3.json")
        for step in range(2):
            c = enumerate_minimal_taylor(3, "search", budget=budget // 2, checkpoint=ck)
            print(f"three elements, pass {step + 1}: position {c.position} of {c.total},"
                  f" {c.class_count} classes, {len(c.skipped)} tables skipped")


if __name__ == "__main__":
    main(int(sys.argv[1]) if len(sys.argv) > 1 else 200)
