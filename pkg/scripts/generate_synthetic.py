#!/usr/bin/env python3
"""Regenerate the bundled synthetic dataset under data/synthetic.

The generator is fully seeded, so rerunning this script reproduces the
committed files byte for byte. Pass a directory to write elsewhere.
"""

import argparse
import os
import sys

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from netmine.synth import DEMO_SPEC, generate, write_dataset  # noqa: E402


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    default_out = os.path.join(
        os.path.dirname(os.path.abspath(__file__)), "..", "data", "synthetic"
    )
    parser.add_argument("out_dir", nargs="?", default=os.path.normpath(default_out))
    args = parser.parse_args()
    net, truth = generate(DEMO_SPEC)
    write_dataset(net, truth, args.out_dir)
    print(f"wrote {net.node_count} nodes, {net.edge_count} edges -> {args.out_dir}")


if __name__ == "__main__":
    main()
