"""End-to-end acceptance runs.

Each test drives one named scenario through the same entry point the
``repro`` subcommand uses, prints one [PASS]/[FAIL] line per check, and
enforces the scenario's runtime budget.  Tolerances live inside the
scenarios themselves; these tests only assert the verdicts.
"""

import time

from boxdim.scenarios import run_scenario


def drive(name, out_dir, limit_seconds):
    start = time.perf_counter()
    report = run_scenario(name, out_dir)
    elapsed = time.perf_counter() - start
    for line in report.lines():
        print(line)
    verdict = "PASS" if report.passed else "FAIL"
    print(f"[{verdict}] scenario {name} ({elapsed:.1f}s)")
    assert elapsed < limit_seconds, \
        f"{name} took {elapsed:.1f}s (budget {limit_seconds}s)"
    failed = "\n".join(c.line() for c in report.checks if not c.passed)
    assert report.passed, f"failed checks:\n{failed}"
    return report


def test_01_hierarchical_diameter_formula(tmp_path):
    drive("hm-diameter", tmp_path, 60)


def test_02_hierarchical_small_exact_covers(tmp_path):
    drive("hm-exact", tmp_path, 60)
    assert (tmp_path / "cover_ell3.txt").exists()


def test_03_hierarchical_certified_decay(tmp_path):
    report = drive("hm-decay", tmp_path, 120)
    assert report.find("decay-rate slope within 0.02 of log(3)/2").passed


def test_04_growth_model_counts(tmp_path):
    drive("shm-counts", tmp_path, 60)


def test_05_growth_model_dimension_bracket(tmp_path):
    # The bracket the anchor-class and chain-tip counts pin down is
    # tight (width 0) but sits at log(5)/2, not log(5): both counts
    # scale like V(n-k-1) ~ 5^n e^{-ell}, one factor of 2 short in the
    # exponent rate.  The containment check below therefore fails, and
    # is expected to keep failing; see README "Known gaps".
    drive("shm-bracket", tmp_path, 120)


def test_06_tree_closed_forms(tmp_path):
    report = drive("tree-forms", tmp_path, 120)
    assert report.find("binary bracket midpoint within 0.03 of 0.3466").passed
    assert report.find("twothree bracket midpoint within 0.03 of 0.4479").passed


def test_07_tree_boxing_sandwich(tmp_path):
    drive("tree-sandwich", tmp_path, 300)


def test_08_tree_total_size_bound(tmp_path):
    drive("tree-sizebound", tmp_path, 60)


def test_09_cesaro_averaging(tmp_path):
    report = drive("cesaro", tmp_path, 120)
    assert report.find(
        "fixed-ell inner sequence keeps oscillating by >= 0.1").passed
    assert report.find("averaged value within 0.02 of log(6)/4").passed


def test_10_random_tree_concentration(tmp_path):
    drive("gw-concentration", tmp_path, 300)


def test_11_hierarchical_path_construction(tmp_path):
    drive("hm-path", tmp_path, 60)


def test_12_solver_against_bruteforce(tmp_path):
    drive("solver-oracle", tmp_path, 300)
