"""Membership throughput: compiled matcher vs the pure-Python fallback.

Runs the same accept/reject workload through both backends and reports
strings per second plus the speedup. Probes are half in-language samples,
half mutated rejects, so memo behavior on failures is exercised too.

Usage: python3 benchmarks/bench_matching.py [--grammar pos] [--n 2000]
"""

import argparse
import importlib.resources
import random
import time

from ruaguard.generation import sample
from ruaguard.grammar import load_grammar
from ruaguard.matching import BACKEND, make_matcher


def build_probes(grammar, n: int, seed: int) -> list[str]:
    batch = sample(grammar, n // 2, seed, dedup=False)
    rng = random.Random(seed + 1)
    probes = list(batch.utterances)
    for text in batch.utterances:
        # mutate one character so roughly half the probes are rejects
        pos = rng.randrange(len(text))
        probes.append(text[:pos] + "\x00" + text[pos + 1:])
    rng.shuffle(probes)
    return probes


def run(matcher, probes: list[str]) -> tuple[float, int]:
    start = time.perf_counter()
    accepted = sum(matcher.accepts(text) for text in probes)
    return time.perf_counter() - start, accepted


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--grammar", default="pos",
                        help="packaged grammar name or a .cfg path")
    parser.add_argument("--n", type=int, default=2000,
                        help="number of probe strings")
    parser.add_argument("--repeat", type=int, default=3,
                        help="timed passes per backend; best pass wins")
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    path = args.grammar
    if not path.endswith(".cfg"):
        data = importlib.resources.files("ruaguard").joinpath("data")
        path = str(data / f"{args.grammar}.cfg")
    grammar = load_grammar(path)
    probes = build_probes(grammar, args.n, args.seed)
    print(f"grammar={args.grammar} probes={len(probes)} default_backend={BACKEND}")

    results = {}
    for backend in ("python", "compiled"):
        try:
            matcher = make_matcher(grammar, backend=backend)
        except RuntimeError as exc:
            print(f"{backend:>8}: unavailable ({exc})")
            continue
        best = None
        accepted = 0
        for _ in range(args.repeat):
            elapsed, accepted = run(matcher, probes)
            best = elapsed if best is None else min(best, elapsed)
        rate = len(probes) / best
        results[backend] = rate
        print(f"{backend:>8}: {best:.3f}s best of {args.repeat}, "
              f"{rate:,.0f} strings/s, {accepted} accepted")

    if "python" in results and "compiled" in results:
        print(f"speedup: {results['compiled'] / results['python']:.1f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
