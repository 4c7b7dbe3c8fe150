"""Command-line driver: run the verification suite, print a summary
table, and emit the certificates as one JSON document.

The JSON layout is versioned ("schema": 1) and stable: a top-level
config echo and the certificate list, keys sorted.  Apart from the
per-check elapsed_ms fields the document is a deterministic function
of the configuration, which is what the determinism audit in the test
suite pins down.

Exit status is 0 exactly when no selected check failed and at least
one ran to a pass.
"""

import argparse
import json
import os
import sys
from dataclasses import asdict

from .suite import (
    CHECK_NAMES,
    VerifierConfig,
    aggregate_ok,
    run_suite,
    _jsonable,
)

CACHE_ENV = "PARAHORIC_CACHE_DIR"


def build_parser():
    p = argparse.ArgumentParser(
        prog="parahoric-verify",
        description="Exact verification suite for the Hecke-algebra and "
                    "coefficient-system identities of GL_n over F_q((t)).")
    p.add_argument("--n", type=int, default=2,
                   help="matrix rank, 2 or 3 (default 2)")
    p.add_argument("--q", type=int, default=2,
                   help="residue field size, 2 or 3 (default 2)")
    p.add_argument("--char", type=int, default=2,
                   help="coefficient characteristic; 0 for the rationals "
                        "(default 2)")
    p.add_argument("--ext-degree", type=int, default=1, dest="ext_degree",
                   help="extension degree of the coefficient field over "
                        "its prime field (default 1)")
    p.add_argument("--chi", default="",
                   help='principal series character, "z=[..];tame=[..]"; '
                        "empty for the trivial character")
    p.add_argument("--budget-L", type=int, default=4, dest="budget_L",
                   help="length budget for the convolution comparisons "
                        "(default 4)")
    p.add_argument("--radius", type=int, default=2,
                   help="ball radius for the chain-complex checks "
                        "(default 2)")
    p.add_argument("--seed", type=int, default=0,
                   help="seed for the sampled checks (default 0)")
    p.add_argument("--checks", default="",
                   help="comma-separated subset of: " + ", ".join(CHECK_NAMES))
    p.add_argument("--cache-dir", default=None, dest="cache_dir",
                   help="directory for coset-table files; defaults to the "
                        f"{CACHE_ENV} environment variable, else no cache")
    p.add_argument("--jobs", type=int, default=1,
                   help="checks run concurrently up to this many workers "
                        "(default 1)")
    p.add_argument("--out", default=None,
                   help="write the JSON document to this path; without it "
                        "the JSON goes to stdout and the table to stderr")
    return p


def summary_table(certificates):
    rows = []
    counts = {"pass": 0, "fail": 0, "skipped": 0}
    for c in certificates:
        counts[c["status"]] += 1
        note = ""
        if c["status"] == "skipped":
            note = c["reason"] or ""
        else:
            bits = [f"{k}={v}" for k, v in c["data"].items()
                    if isinstance(v, (int, bool)) and not isinstance(v, bool)]
            note = " ".join(bits[:4])
        rows.append((c["check"], c["status"], note,
                     str(c["elapsed_ms"]) + "ms"))
    widths = [max(len(r[i]) for r in rows + [("check", "status", "", "")])
              for i in range(4)]
    lines = []
    header = ("check".ljust(widths[0]), "status".ljust(widths[1]), "", "")
    lines.append("  ".join(h for h in header).rstrip())
    for r in rows:
        lines.append("  ".join((r[0].ljust(widths[0]),
                                r[1].ljust(widths[1]),
                                r[3].rjust(widths[3]),
                                r[2])).rstrip())
    verdict = "PASS" if aggregate_ok(certificates) else "FAIL"
    lines.append(f"aggregate: {verdict} ({counts['pass']} pass, "
                 f"{counts['fail']} fail, {counts['skipped']} skipped)")
    return "\n".join(lines) + "\n"


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    cache_dir = args.cache_dir
    if cache_dir is None:
        cache_dir = os.environ.get(CACHE_ENV, "")
    checks = tuple(s.strip() for s in args.checks.split(",") if s.strip())
    cfg = VerifierConfig(
        n=args.n, q=args.q, char=args.char, ext_degree=args.ext_degree,
        chi=args.chi, budget_L=args.budget_L, radius=args.radius,
        seed=args.seed, checks=checks, cache_dir=cache_dir,
        parallelism=args.jobs)
    try:
        certificates = run_suite(cfg)
    except ValueError as e:
        parser.error(str(e))
    doc = {
        "schema": 1,
        "config": _jsonable(asdict(cfg)),
        "certificates": certificates,
    }
    text = json.dumps(doc, indent=2, sort_keys=True) + "\n"
    table = summary_table(certificates)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
        sys.stdout.write(table)
    else:
        sys.stdout.write(text)
        sys.stderr.write(table)
    return 0 if aggregate_ok(certificates) else 1


if __name__ == "__main__":
    raise SystemExit(main())
