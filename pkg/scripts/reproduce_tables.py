"""Rerun the five reference convergence studies and print computed errors beside the reference values.

    python3 scripts/reproduce_tables.py            # all tables
    python3 scripts/reproduce_tables.py 1 4        # a subset
"""

import argparse
import io
import time

from cnpi.harness import StudyConfig, run_study

# (example, M, N ladder, columns); column = (label, alphas, kappa, gamma rule, reference errors)
TABLES = {
    1: (1, 256, (16, 32, 64, 128, 256), [
        ("gamma=1", (0.2, 0.8), 1.0, "uniform",
         ("1.2098e-02", "4.9207e-03", "2.0432e-03", "8.6517e-04", "3.7105e-04")),
        ("gamma=2/(1+a)", (0.2, 0.8), 1.0, "optimal",
         ("1.1501e-03", "2.9352e-04", "7.9232e-05", "2.1719e-05", "5.9279e-06")),
        ("gamma=2/(1+a)+1", (0.2, 0.8), 1.0, "optimal+1",
         ("8.3435e-04", "2.2642e-04", "5.6305e-05", "1.0427e-05", "2.0922e-06")),
    ]),
    2: (1, 512, (8, 16, 32, 64, 128), [
        ("a=(0.15,0.85)", (0.15, 0.85), 2.0, "optimal",
         ("4.8275e-03", "1.1850e-03", "3.0304e-04", "8.1431e-05", "2.2048e-05")),
        ("a=(0.10,0.20)", (0.10, 0.20), 2.0, "optimal",
         ("8.0324e-03", "1.9166e-03", "4.7020e-04", "1.2227e-04", "3.2098e-05")),
        ("a=(0.80,0.90)", (0.80, 0.90), 2.0, "optimal",
         ("4.7639e-03", "8.8628e-04", "1.6001e-04", "3.3122e-05", "8.0217e-06")),
    ]),
    3: (1, 256, (8, 16, 32, 64, 128), [
        ("kappa=0.1", (0.5, 0.5), 0.1, "optimal",
         ("8.1612e-03", "1.7101e-03", "3.9382e-04", "1.0435e-04", "2.8802e-05")),
        ("kappa=1", (0.5, 0.5), 1.0, "optimal",
         ("7.6309e-03", "1.6545e-03", "3.8781e-04", "1.0361e-04", "2.8700e-05")),
        ("kappa=10", (0.5, 0.5), 10.0, "optimal",
         ("3.6283e-03", "1.1474e-03", "3.3003e-04", "9.6406e-05", "2.7706e-05")),
    ]),
    4: (2, 70, (12, 24, 48, 96), [
        ("a=(0.10,0.90)", (0.10, 0.90), 2.0, "optimal",
         ("1.3009e-02", "3.8048e-03", "1.0148e-03", "2.6995e-04")),
        ("a=(0.15,0.20)", (0.15, 0.20), 2.0, "optimal",
         ("1.8510e-02", "5.5602e-03", "1.5145e-03", "4.0689e-04")),
        ("a=(0.80,0.75)", (0.80, 0.75), 2.0, "optimal",
         ("2.8330e-03", "8.7227e-04", "2.4016e-04", "6.2739e-05")),
    ]),
    5: (2, 80, (20, 40, 80, 160), [
        ("kappa=0.1", (0.4, 0.4), 0.1, "optimal",
         ("4.9569e-03", "1.4339e-03", "4.2049e-04", "1.1680e-04")),
        ("kappa=1", (0.4, 0.4), 1.0, "optimal",
         ("4.9365e-03", "1.4326e-03", "4.2019e-04", "1.1674e-04")),
        ("kappa=10", (0.4, 0.4), 10.0, "optimal",
         ("4.7628e-03", "1.4210e-03", "4.1732e-04", "1.1611e-04")),
    ]),
}


def column_config(table, col):
    example, M, Ns, cols = TABLES[table]
    _, alphas, kappa, rule, _ = cols[col]
    return StudyConfig(example=example, alphas=alphas, kappa=kappa, gamma_rule=rule,
                       N_list=Ns, M=M, timing=False, floor=False)


def reproduce(table):
    example, M, Ns, cols = TABLES[table]
    print(f"\nTable {table}: example {example}, M={M}")
    matched = total = 0
    for c, (label, *_, reference) in enumerate(cols):
        t0 = time.perf_counter()
        report = run_study(column_config(table, c), sink=io.StringIO())
        print(f"  {label}  ({time.perf_counter() - t0:.1f}s)")
        print(f"  {'N':>5}  {'computed':>10}  {'reference':>10}  rate")
        for row, ref in zip(report.rows, reference):
            got = f"{row['error']:.4e}"
            rate = "   *" if row["rate"] is None else f"{row['rate']:.2f}"
            mark = "" if got == ref else "  <- differs"
            matched += got == ref
            total += 1
            print(f"  {row['N']:>5}  {got:>10}  {ref:>10}  {rate}{mark}")
    print(f"  {matched}/{total} entries match to the printed digits")
    return matched, total


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("tables", nargs="*", type=int, default=sorted(TABLES))
    args = ap.parse_args()
    m = t = 0
    for k in args.tables:
        a, b = reproduce(k)
        m, t = m + a, t + b
    print(f"\noverall: {m}/{t} entries match")


if __name__ == "__main__":
    main()
