#!/usr/bin/env python3
"""Smoke test for the lexiclock Python extension module.

Builds nothing itself: expects `cargo build -p lexiclock-py --release`
(or a debug build) to have produced target/<profile>/liblexiclock.so.
Set LEXICLOCK_SO to point at the library explicitly.
"""

import math
import os
import shutil
import sys
import tempfile

REPO_ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))

CHECKS = []


def check(name, ok, detail=""):
    CHECKS.append((name, ok))
    status = "ok" if ok else "FAIL"
    suffix = f"  ({detail})" if detail else ""
    print(f"  {status:4} {name}{suffix}")


def close(a, b, tol=1e-12):
    return abs(a - b) <= tol * max(1.0, abs(a), abs(b))


def locate_library():
    override = os.environ.get("LEXICLOCK_SO")
    if override:
        return override
    for profile in ("release", "debug"):
        path = os.path.join(REPO_ROOT, "target", profile, "liblexiclock.so")
        if os.path.exists(path):
            return path
    sys.exit("liblexiclock.so not found; run `cargo build -p lexiclock-py --release` first")


def import_module(workdir):
    # Python refuses the `lib` prefix, so import a renamed copy.
    target = os.path.join(workdir, "lexiclock.so")
    shutil.copyfile(locate_library(), target)
    sys.path.insert(0, workdir)
    import lexiclock

    return lexiclock


def write_dataset(lx, workdir):
    """Two clades of six varieties; cross-clade pairs share 3 of 4 words."""
    words = {
        "x": ["aaaa", "aabb", "bbaa", "abab"],
        "y": ["aaaa", "aabb", "bbaa", "wxyz"],
    }
    meta_path = os.path.join(workdir, "meta.csv")
    lists_path = os.path.join(workdir, "lists.tsv")
    with open(meta_path, "w") as meta:
        meta.write("variety,name,latitude,longitude,clade\n")
        for clade, lon in (("x", 0.0), ("y", 10.0)):
            for i in range(6):
                vid = f"{clade}{i}"
                meta.write(f"{vid},{vid.upper()},{float(i)},{lon},{clade}\n")
    with open(lists_path, "w") as lists:
        lists.write("variety\tconcept\tword\n")
        for clade in ("x", "y"):
            for i in range(6):
                for c, word in enumerate(words[clade]):
                    lists.write(f"{clade}{i}\tc{c}\t{word}\n")
    return lx.load_dataset(lists_path, meta_path)


def main():
    workdir = tempfile.mkdtemp(prefix="lexiclock-smoke-")
    lx = import_module(workdir)
    print(f"imported lexiclock from {os.path.join(workdir, 'lexiclock.so')}")

    p = lx.EvolutionParams()
    check("default params", close(p.lambda_, 1.4e-4) and close(p.mu, 1.6e-4) and p.m == 207)
    check("mu_hat", close(p.mu_hat(), 1.2911196911196911e-4), f"{p.mu_hat():.6e}")

    mean, var = lx.moments_omega(p, 1000.0)
    check(
        "omega moments at t=1000",
        close(mean, 0.75578374145572547) and close(var, 8.9166510921212844e-4),
        f"mean={mean:.12f} var={var:.6e}",
    )
    phi_mean, phi_var = lx.moments_phi(p, 1000.0)
    _, varphi_var = lx.moments_varphi(p, 1000.0)
    chi_mean, chi_var = lx.moments_chi(p, 1000.0)
    check("phi mean at t=1000", close(phi_mean, 0.54881163609402643), f"{phi_mean:.12f}")
    check("variance decomposition", phi_var == varphi_var + chi_var and chi_mean == 0.0)
    check(
        "char match probability",
        close(lx.char_match_prob_cognate(p, 1000.0), 0.77901601833359615),
    )

    r300 = lx.relative_error(p, 300.0, "omega")
    check("relative error omega t=300", close(r300, 0.49015621491798473, 1e-9), f"{r300:.6f}")
    rows = lx.error_curves(p, 300.0, 6000.0, 100.0)
    check("error curve grid", len(rows) == 58 and rows[0][0] == 300.0 and rows[-1][0] == 6000.0)

    d = lx.date_from_statistic(0.755784, p, "omega")
    check(
        "dating interval",
        abs(d.t_hat - 999.9987782586467) < 1e-6
        and abs(d.t_lower - 728.38253336557462) < 1e-6
        and abs(d.t_upper - 1293.9850987973042) < 1e-6,
        f"t_hat={d.t_hat:.4f} [{d.t_lower:.4f}, {d.t_upper:.4f}]",
    )
    unbounded = lx.date_from_statistic(0.004, p, "omega")
    check("unbounded upper limit", math.isinf(unbounded.t_upper))

    check("levenshtein", lx.levenshtein("kitten", "sitting") == 3)
    check("normalized levenshtein", close(lx.normalized_levenshtein("abcd", "abcf"), 0.25))
    check("hamming overlap", close(lx.hamming_overlap("abcd", "abcf"), 0.75))
    check("word distance mixed lengths", close(lx.word_distance("abc", "abcd"), 0.25))

    flags = lx.detect_cognates(["casa", "cane", ""], ["caza", "perro", "agua"], 0.5)
    check("cognacy flags", flags == ["cognate", "non_cognate", "unknown"])
    stats = lx.compare_lists(["casa", "cane"], ["caza", "perro"], 0.5, 5.18)
    check(
        "pair statistics identity",
        close(stats.phi, stats.varphi + stats.chi) and stats.n_compared == 2,
        f"omega={stats.omega} phi={stats.phi:.6f}",
    )

    sp = lx.SimParams(t=1000.0, n_sym=5, l_word=8, m=207, seed=7)
    first = lx.simulate_pair(sp, "events")
    again = lx.simulate_pair(sp, "events")
    check(
        "simulation is seed deterministic",
        first.words_a == again.words_a and first.cognate == again.cognate,
    )
    check(
        "simulated lists have m concepts",
        len(first.words_a) == 207 and all(len(w) == 8 for w in first.words_b),
    )

    mc = lx.monte_carlo(sp, 4000, "endpoint")
    z = abs(mc.omega.mean - mean) / mc.omega.std_error
    check("monte carlo matches analytics", z < 5.0, f"z={z:.2f} over {mc.replicates} replicates")

    ds = write_dataset(lx, workdir)
    check("dataset shape", ds.n_varieties == 12 and ds.n_concepts == 4)
    check("dataset lookup", ds.word("x0", "c3") == "abab")
    lam = lx.estimate_lambda(ds, 1000.0, 0.0, 0.5)
    expected = -math.log(0.75) / 2000.0
    check("lambda recovery", close(lam, expected), f"{lam:.6e} vs {expected:.6e}")
    n_est = lx.estimate_n(ds)
    check("alphabet estimate is finite", n_est > 1.0, f"n_eff={n_est:.3f}")
    sweep = lx.sweep_g(ds, 1000.0, 0.0, 3000.0, 1500.0, 0.5)
    check(
        "sweep sentinel rows",
        sweep[0].pair_count == 36
        and sweep[0].lambda_ is not None
        and sweep[-1].pair_count == 0
        and sweep[-1].lambda_ is None,
    )
    check(
        "geo distance antipodal",
        close(lx.geo_distance(90.0, 0.0, -90.0, 0.0), 20015.114442036, 1e-9),
    )

    failed = [name for name, ok in CHECKS if not ok]
    print()
    if failed:
        print(f"{len(failed)} of {len(CHECKS)} checks failed: {', '.join(failed)}")
        sys.exit(1)
    print(f"all {len(CHECKS)} checks passed")


if __name__ == "__main__":
    main()
