"""Print one PASS/FAIL line per acceptance criterion.

    python3 scripts/run_acceptance.py            # all
    python3 scripts/run_acceptance.py 2 5 10     # a subset
"""
import importlib.util
import pathlib
import sys

HERE = pathlib.Path(__file__).resolve().parent
spec = importlib.util.spec_from_file_location("acceptance", HERE.parent / "tests" / "test_acceptance.py")
acc = importlib.util.module_from_spec(spec)
spec.loader.exec_module(acc)


def main(argv):
    picks = [int(a) for a in argv] or range(1, len(acc.CRITERIA) + 1)
    failed = 0
    for i in picks:
        out = acc.CRITERIA[i - 1]()
        print(out.line(f"C{i}"), flush=True)
        failed += not out.passed
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main(sys.argv[1:]))
