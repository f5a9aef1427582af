"""
================================================================================
DESCRIPTIVE KEYPHRASES — MODULE TESTER
================================================================================
Checks that dependencies import, project modules load, fixture files are in
place and the environment is sane. Run directly for a readable report:

    python test_modules.py            # everything
    python test_modules.py --quick    # imports only
    python test_modules.py --env      # environment only

Under pytest, test_environment_ready() fails on any [FAIL] item.
================================================================================
"""

import os
import sys
import importlib
from pathlib import Path

ROOT = Path(__file__).parent


def ok(msg): print(f"  [OK] {msg}")
def fail(msg): print(f"  [FAIL] {msg}")
def warn(msg): print(f"  [WARN] {msg}")
def info(msg): print(f"  [INFO] {msg}")
def header(msg): print(f"\n{'='*60}\n{msg}\n{'='*60}")


# ==================== CHECKS ====================

def check_core_imports():
    """Third-party libraries"""
    header("CORE IMPORTS")
    results = {}

    core_libs = [
        ("dotenv", "python-dotenv - Environment Variables"),
        ("numpy", "NumPy - Arrays"),
        ("scipy.special", "SciPy - Logistic function"),
        ("pandas", "pandas - Feature matrices"),
        ("regex", "regex - Tag pattern matching"),
    ]

    for lib, desc in core_libs:
        try:
            importlib.import_module(lib)
            ok(desc)
            results[lib] = True
        except ImportError:
            fail(f"{desc} - pip install -r requirements.txt")
            results[lib] = False

    return results


def check_project_modules():
    """Every pipeline module imports cleanly"""
    header("PROJECT MODULES")
    results = {}

    modules = [
        "core", "corpus_ingest", "candidates", "commonness", "freq_features",
        "grammar_features", "positional_features", "feature_pipeline",
        "model", "evaluation", "analysis", "run",
    ]

    for name in modules:
        try:
            importlib.import_module(name)
            ok(name)
            results[name] = True
        except Exception as e:
            fail(f"{name} - {type(e).__name__}: {e}")
            results[name] = False

    return results


def check_file_structure():
    """Fixture corpus and data files"""
    header("FILE STRUCTURE")
    results = {}

    required = {
        "foreground": ROOT / "fixtures" / "foreground",
        "background": ROOT / "fixtures" / "background",
        "annotations": ROOT / "fixtures" / "annotations",
        "responses": ROOT / "fixtures" / "responses.csv",
        "blocklist": ROOT / "data" / "spurious_phrases.txt",
        "run_config": ROOT / "fixtures" / "run_config.json",
    }

    for name, path in required.items():
        if path.exists():
            ok(f"{name}: {path.relative_to(ROOT)}")
            results[name] = True
        else:
            fail(f"{name} - Missing {path.relative_to(ROOT)}")
            results[name] = False

    foreground = {p.stem for p in required["foreground"].glob("*.txt")}
    annotations = {p.stem for p in required["annotations"].glob("*.ann")}
    unannotated = sorted(foreground - annotations)
    if unannotated:
        warn(f"No annotations for: {', '.join(unannotated)}")
        results["annotations_complete"] = "warn"
    else:
        ok(f"All {len(foreground)} foreground documents annotated")
        results["annotations_complete"] = True

    return results


def check_env_variables():
    """KEYPHRASE_* overrides in the environment"""
    header("ENVIRONMENT")
    results = {}

    try:
        from core.config import Config
        config = Config.from_env()
        problems = config.validate()
    except Exception as e:
        fail(f"Config.from_env - {type(e).__name__}: {e}")
        return {"config": False}

    overrides = sorted(k for k in os.environ if k.startswith("KEYPHRASE_"))
    for key in overrides:
        info(f"{key} is set")

    if problems:
        for problem in problems:
            fail(problem)
        results["config"] = False
    else:
        ok(f"Configuration valid (seed={config.seed}, workers={config.workers})")
        results["config"] = True

    return results


def run_checks(quick: bool = False, env_only: bool = False) -> dict:
    if env_only:
        return {"env": check_env_variables()}

    all_results = {"core": check_core_imports()}
    if not quick:
        all_results["modules"] = check_project_modules()
        all_results["files"] = check_file_structure()
    all_results["env"] = check_env_variables()
    return all_results


def print_summary(all_results) -> int:
    """Print totals; returns the number of failed checks"""
    header("SUMMARY")

    passed = warned = failed = 0
    for results in all_results.values():
        for value in results.values():
            if value is True:
                passed += 1
            elif value == "warn":
                warned += 1
            else:
                failed += 1

    print(f"\n  [OK] Passed: {passed}")
    print(f"  [WARN] Warnings: {warned}")
    print(f"  [FAIL] Failed: {failed}")
    print(f"  Total: {passed + warned + failed}")

    if failed == 0:
        print(f"\n  All checks passed! Pipeline ready.")
    else:
        print(f"\n  Some issues found. Check above.")
    return failed


def test_environment_ready():
    assert print_summary(run_checks()) == 0


def main():
    import argparse
    parser = argparse.ArgumentParser(description="Check Descriptive Keyphrases modules")
    parser.add_argument("--quick", action="store_true", help="Only check imports")
    parser.add_argument("--env", action="store_true", help="Check environment only")
    args = parser.parse_args()

    print("")
    print("=" * 60)
    print("       DESCRIPTIVE KEYPHRASES - MODULE TESTER")
    print("=" * 60)

    failed = print_summary(run_checks(quick=args.quick, env_only=args.env))
    sys.exit(1 if failed else 0)


if __name__ == "__main__":
    main()
