"""Print ranks, exactness and twist flags of the boundary/coboundary ladder for n = 1..N.

    python3 scripts/ladder_table.py [--max-n 8]
"""
import argparse
import time

from phaseweb.algebra import verify_identities, verify_ladder


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--max-n", type=int, default=7)
    args = ap.parse_args()

    print(f"{'n':>2}  {'dims':<34} {'rank d_k':<28} exact twist ids  secs")
    for n in range(1, args.max_n + 1):
        t = time.perf_counter()
        rep = verify_ladder(n)
        ids = all(verify_identities(n).values()) if n >= 2 else True
        secs = time.perf_counter() - t
        print(f"{n:>2}  {str(rep.dims):<34} {str(rep.boundary_ranks):<28} "
              f"{'yes' if all(rep.exact) else 'NO':<5} {'yes' if all(rep.twisted) else 'NO':<5} "
              f"{'yes' if ids else 'NO':<4} {secs:5.2f}")


if __name__ == "__main__":
    main()
