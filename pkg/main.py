#!/usr/bin/env python3
"""
Command-line interface for the Frey elimination toolkit.
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional

# Add src to path
sys.path.insert(0, str(Path(__file__).parent / 'src'))

# Check if we're in the right environment and provide helpful error messages
try:
    from sympy import isprime, primerange

    from src.config import Config
    from src.errors import CertificateError, FreyError
    from src.pipeline import FreyPipeline
except ImportError as e:
    print("❌ Import Error: Required dependencies not found.")
    print(f"   Details: {e}")
    print()
    print("💡 This usually means the virtual environment is not activated.")
    print("   Please run one of the following:")
    print()
    print("   Option 1: Activate virtual environment manually")
    print("   source venv/bin/activate")
    print("   python main.py [command]")
    print()
    print("   Option 2: Install dependencies")
    print("   pip install -r requirements.txt")
    print()
    print("📚 For more help, see README.md or run: python validate.py")
    sys.exit(1)


def parse_q_list(text: str) -> List[int]:
    """Parse '3,7,11' or a range '3-50' (primes only)."""
    primes = set()
    for part in text.split(','):
        part = part.strip()
        if not part:
            continue
        if '-' in part:
            low, high = (int(x) for x in part.split('-', 1))
            primes.update(primerange(low, high + 1))
        else:
            q = int(part)
            if not isprime(q):
                raise ValueError(f"{q} is not prime")
            primes.add(q)
    if not primes:
        raise ValueError(f"no primes in {text!r}")
    return sorted(primes)


def good_primes(r: int, a: int, b: int, q_list: List[int]) -> List[int]:
    return [q for q in q_list if q not in (2, r) and (a ** r + b ** r) % q]


class UsageParser(argparse.ArgumentParser):
    """Report usage errors with exit status 1; status 2 is reserved for certificate failures."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"❌ Error: {message}")
        sys.exit(1)


def build_parser() -> argparse.ArgumentParser:
    parser = UsageParser(
        description="Frey elimination toolkit - Frey hyperelliptic curves for x^r + y^r = d z^p"
    )

    parser.add_argument(
        '--config',
        default=None,
        help='Path to configuration file (default: $FREY_CONFIG, config.yaml, or built-in defaults)'
    )
    parser.add_argument('--workers', type=int, default=None, help='Worker threads for point counting')
    parser.add_argument('--out', default=None, help='Artifact directory (overrides output.artifact_dir)')
    parser.add_argument('--verbose', '-v', action='count', default=0, help='Increase log verbosity')

    subparsers = parser.add_subparsers(dest='command', help='Available commands')

    verify_parser = subparsers.add_parser('verify', help='Run the polynomial identity suite')
    verify_parser.add_argument('--r-max', type=int, default=None, help='Largest prime r to check')

    curve_parser = subparsers.add_parser('curve', help='Build C_r(a,b) and certify its discriminant')
    for flag in ('--r', '--a', '--b'):
        curve_parser.add_argument(flag, type=int, required=True)

    classify_parser = subparsers.add_parser('classify', help='Reduction types, Serre level and irreducibility')
    for flag in ('--r', '--a', '--b'):
        classify_parser.add_argument(flag, type=int, required=True)
    classify_parser.add_argument('--d', type=int, default=1)
    classify_parser.add_argument('--p', type=int, default=None, help='Exponent for the finiteness check')
    classify_parser.add_argument('--units', default=None, help='JSON file of unit coefficient vectors')

    traces_parser = subparsers.add_parser('traces', help='Frobenius trace sets T_q')
    for flag in ('--r', '--a', '--b'):
        traces_parser.add_argument(flag, type=int, required=True)
    group = traces_parser.add_mutually_exclusive_group(required=True)
    group.add_argument('--q', type=int)
    group.add_argument('--q-list', help="Primes, e.g. '3,7,11' or '3-50' (bad primes in ranges are skipped)")

    cm_parser = subparsers.add_parser('cm-fixture', help='Write the CM fixture attached to J_r(0,1)')
    cm_parser.add_argument('--r', type=int, required=True)
    cm_parser.add_argument('--q-list', required=True)
    cm_parser.add_argument('--fixtures', required=True, help='Output fixture file')

    elim_parser = subparsers.add_parser('eliminate', help='Bounds N, M, B and surviving exponents')
    elim_parser.add_argument('--r', type=int, required=True)
    elim_parser.add_argument('--d', type=int, default=1)
    elim_parser.add_argument('--fixtures', required=True)
    elim_parser.add_argument('--q-list', required=True)
    elim_parser.add_argument('--subset', default=None, help="Galois indices such as '1,2', or 'full'")
    elim_parser.add_argument('--twist', choices=['plain', 'chi_r'], default='plain')

    refined_parser = subparsers.add_parser('refined', help='Refined elimination for a totally split p')
    refined_parser.add_argument('--fixtures', required=True)
    refined_parser.add_argument('--p', type=int, required=True)
    refined_parser.add_argument('--q', type=int, required=True)
    refined_parser.add_argument('--d', type=int, default=1)
    refined_parser.add_argument('--subset', default=None)
    refined_parser.add_argument('--case', choices=['plain', 'both_twists', 'chi_r'], default='plain')

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """Main CLI entry point. Returns 0 on success, 1 on usage errors, 2 on certificate failures."""
    parser = build_parser()
    args = parser.parse_args(argv)

    logging.basicConfig(
        level=logging.WARNING - 10 * min(args.verbose, 2),
        format='%(asctime)s %(name)s %(levelname)s %(message)s',
    )

    if not args.command:
        parser.print_help()
        return 1

    try:
        config = Config.resolve(args.config)
        pipeline = FreyPipeline(config, workers=args.workers, artifact_dir=args.out)

        if args.command == 'verify':
            result = pipeline.verify(args.r_max)

        elif args.command == 'curve':
            result = pipeline.curve(args.r, args.a, args.b)

        elif args.command == 'classify':
            result = pipeline.classify(args.r, args.a, args.b, args.d, args.p, args.units)

        elif args.command == 'traces':
            if args.q is not None:
                q_list = [args.q]
            else:
                q_list = good_primes(args.r, args.a, args.b, parse_q_list(args.q_list))
            result = pipeline.traces(args.r, args.a, args.b, q_list)

        elif args.command == 'cm-fixture':
            result = pipeline.cm_fixture(args.r, parse_q_list(args.q_list), args.fixtures)

        elif args.command == 'eliminate':
            result = pipeline.eliminate(args.r, args.d, args.fixtures, parse_q_list(args.q_list),
                                        args.subset, args.twist)

        elif args.command == 'refined':
            result = pipeline.refined(args.fixtures, args.p, args.q, args.case, args.d, args.subset)

        print(f"\n✅ {args.command} finished")
        print(f"📄 Artifact: {result['artifact']}")
        return 0

    except CertificateError as e:
        print(f"❌ Certificate failure: {e}")
        return e.exit_code

    except FileNotFoundError as e:
        print(f"❌ Error: {e}")
        if "config" in str(e).lower():
            print("\n💡 Tip: Copy config.template.yaml to config.yaml, or omit --config to use defaults")
        return 1

    except (FreyError, ValueError) as e:
        print(f"❌ Error: {e}")
        return 1


if __name__ == "__main__":
    sys.exit(main())
