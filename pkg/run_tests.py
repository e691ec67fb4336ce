#!/usr/bin/env python
"""
Test runner for the partial-annotation learning package.

Usage:
    python run_tests.py              # Run all tests with coverage
    python run_tests.py unit         # Run only unit tests
    python run_tests.py integration  # Run only integration tests (end-to-end training)
    python run_tests.py quick        # Unit tests without coverage, stop at the first failure
    python run_tests.py -k test_name # Run specific test pattern
"""

import sys
import subprocess
import os

SUITES = {
    'unit': 'app/test/unit',
    'integration': 'app/test/integration',
}


def main():
    """Run the selected tests using pytest."""
    script_dir = os.path.dirname(os.path.abspath(__file__))
    os.chdir(script_dir)

    env = os.environ.copy()
    env['PYTHONPATH'] = script_dir

    args = sys.argv[1:]
    if args and args[0] == 'quick':
        pytest_args = [sys.executable, '-m', 'pytest', SUITES['unit'], '-x', '-q'] + args[1:]
        sys.exit(subprocess.run(pytest_args, env=env).returncode)

    target = 'app/test'
    if args and args[0] in SUITES:
        target = SUITES[args.pop(0)]
    pytest_args = [sys.executable, '-m', 'pytest', target,
                   '--cov=app',
                   '--cov-report=term-missing',
                   '--cov-report=html']
    pytest_args.extend(args)

    result = subprocess.run(pytest_args, env=env)

    if result.returncode == 0:
        print("\n" + "=" * 70)
        print("Coverage report generated: htmlcov/index.html")
        print("=" * 70)

    sys.exit(result.returncode)


if __name__ == '__main__':
    main()
