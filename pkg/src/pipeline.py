"""Main pipeline orchestrator for the Frey elimination toolkit."""

import hashlib
import json
import logging
from datetime import datetime
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

from jinja2 import Template
from sympy import factorint, primerange

from . import __version__
from .config import Config
from .curves import (
    curve_discriminant,
    frey_specialization,
    kraus_curve,
    legendre_companion,
    twist_class,
    twist_scaling,
)
from .cyclofield import cyclo_field
from .elimination import (
    TraceStore,
    cm_fixture,
    load_fixtures,
    parse_subset,
    refined_eliminate,
    save_fixtures,
    survivors,
)
from .errors import CertificateError, UnsupportedParityError
from .freypoly import chebyshev_coeffs, identity_suite
from .frobenius import trace_set
from .localdata import (
    classify_prime,
    finiteness_check,
    irreducibility_report,
    semistable_congruences,
    serre_level,
)

logger = logging.getLogger(__name__)

TOOL_NAME = 'frey-elim'
SAFE_INTEGER = 2 ** 53

REPORT_TEMPLATE = Template("""# {{ command }} report

**Generated on:** {{ timestamp }}
**Status:** {{ status }}
**Artifact:** `{{ artifact }}`

## Arguments
{% for key, value in arguments | dictsort %}- **{{ key }}:** {{ value }}
{% endfor %}
## Summary
{% for line in summary %}- {{ line }}
{% endfor %}""")


def _jsonable(value: Any) -> Any:
    """Convert outputs to JSON; integers beyond 2^53 become decimal strings."""
    if isinstance(value, bool) or value is None or isinstance(value, (str, float)):
        return value
    if isinstance(value, int):
        return str(value) if abs(value) >= SAFE_INTEGER else value
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if hasattr(value, 'to_json'):
        return _jsonable(value.to_json())
    return str(value)


class FreyPipeline:
    """Pipeline that runs each toolkit command and records a reproducible artifact."""

    def __init__(self, config: Optional[Config] = None, workers: Optional[int] = None,
                 artifact_dir: Optional[str] = None):
        """
        Initialize the pipeline with configuration.

        Args:
            config: Loaded configuration (defaults when None)
            workers: Override for counting.workers
            artifact_dir: Override for output.artifact_dir
        """
        self.config = config or Config.defaults()
        self.options = self.config.counting_options(workers)
        self.output_config = dict(self.config.output_config)
        if artifact_dir:
            self.output_config['artifact_dir'] = artifact_dir
        self.store = TraceStore(self.options)

    def verify(self, r_max: Optional[int] = None) -> Dict[str, Any]:
        r_max = r_max or self.config.field_config['r_max']
        print(f"Verifying polynomial identities for r <= {r_max}")

        print("1. Running the identity suite...")
        reports = [identity_suite(r, r_max) for r in primerange(3, r_max + 1)]
        failures = [f"r={rep.r} {check.name}: {check.detail}" for rep in reports for check in rep.failures()]

        print("2. Checking Chebyshev coefficient lists...")
        coefficients = {str(rep.r): chebyshev_coeffs(rep.r) for rep in reports}

        outputs = {'reports': reports, 'chebyshev_coeffs': coefficients}
        summary = [f"{len(reports)} primes checked", f"{len(failures)} failures"] + failures
        result = self._finish('verify', {'r_max': r_max}, outputs, summary, failed=bool(failures))
        if failures:
            raise CertificateError(f"identity suite failed: {failures[0]}")
        print(f"✅ All identities hold for {len(reports)} primes")
        return result

    def curve(self, r: int, a: int, b: int) -> Dict[str, Any]:
        print(f"Building C_{r}({a},{b})")

        print("1. Building the Frey curve...")
        model = kraus_curve(r, a, b)

        print("2. Certifying the discriminant...")
        disc = curve_discriminant(r, a, b)

        print("3. Computing the specialization data...")
        outputs: Dict[str, Any] = {
            'model': model,
            'equation': str(model),
            'discriminant': disc,
            'specialization': frey_specialization(r, a, b),
            'interchange_twist': twist_class(r, a, b),
        }
        if a * b != 0:
            outputs['legendre'] = legendre_companion(r, a, b)
            outputs['twist_scaling'] = twist_scaling(r, a, b)

        summary = [f"y^2 = {model}", f"discriminant = {disc}"]
        print(f"   y^2 = {model}")
        print(f"   discriminant = {disc}")
        return self._finish('curve', {'r': r, 'a': a, 'b': b}, outputs, summary)

    def classify(self, r: int, a: int, b: int, d: int = 1, p: Optional[int] = None,
                 units_path: Optional[str] = None) -> Dict[str, Any]:
        print(f"Classifying J_{r}({a},{b})")

        print("1. Classifying primes...")
        primes = sorted({2, r} | {q for q in _prime_factors(a ** r + b ** r)})
        table = []
        for q in primes:
            try:
                table.append(classify_prime(r, a, b, q).to_json())
            except UnsupportedParityError as e:
                table.append({'q': q, 'type': 'unsupported-parity', 'detail': str(e)})

        print("2. Computing the Serre level...")
        level = serre_level(r, d, (a + b) % r == 0)

        print("3. Checking irreducibility criteria...")
        units = self._load_units(r, units_path)
        try:
            irred = irreducibility_report(r, a, b, units).to_json()
        except UnsupportedParityError as e:
            irred = {'verdict': 'unsupported-parity', 'detail': str(e)}

        outputs: Dict[str, Any] = {'primes': table, 'serre_level': level, 'irreducibility': irred}
        if (a + b) % r == 0:
            print("4. Running the semistable congruence battery...")
            outputs['semistable'] = semistable_congruences(r, a, b)
        if p is not None:
            outputs['finiteness'] = {str(q): finiteness_check(r, a, b, p, q) for q in primes if (2 * r) % q}

        for row in table:
            print(f"   q={row['q']}: {row['type']}")
        print(f"   Serre level: {level.describe()}")
        summary = [f"q={row['q']}: {row['type']}" for row in table] + [f"Serre level {level.describe()}"]
        return self._finish('classify', {'r': r, 'a': a, 'b': b, 'd': d, 'p': p, 'units': units_path},
                            outputs, summary)

    def traces(self, r: int, a: int, b: int, q_list: Sequence[int]) -> Dict[str, Any]:
        print(f"Computing trace sets of J_{r}({a},{b}) at {len(q_list)} primes")
        sets = []
        for i, q in enumerate(q_list, start=1):
            print(f"{i}. q = {q}...")
            ts = trace_set(r, a, b, q, self.options)
            sets.append(ts)
            print(f"   T_q = {{{', '.join(str(u) for u in ts.elements)}}}")
        summary = [f"q={ts.q}: {', '.join(str(u) for u in ts.elements)}" for ts in sets]
        return self._finish('traces', {'r': r, 'a': a, 'b': b, 'q_list': list(q_list)},
                            {'trace_sets': sets}, summary)

    def cm_fixture(self, r: int, q_list: Sequence[int], fixture_path: str) -> Dict[str, Any]:
        print(f"Generating the CM fixture for r={r}")

        print("1. Computing eigenvalues from J_r(0,1)...")
        fixture = cm_fixture(r, q_list, self.options, self.store)

        print("2. Saving the fixture...")
        path = save_fixtures(fixture_path, [fixture])
        print(f"   Saved to {path}")
        return self._finish('cm-fixture', {'r': r, 'q_list': list(q_list), 'fixtures': fixture_path},
                            {'fixture': fixture}, [f"{len(fixture.eigenvalues)} eigenvalues written to {path}"])

    def eliminate(self, r: int, d: int, fixture_path: str, q_list: Sequence[int],
                  subset: Optional[Any] = None, twist_mode: str = 'plain') -> Dict[str, Any]:
        subset = subset if subset is not None else self.config.elimination_config['strategy']
        print(f"Eliminating newforms for r={r}, d={d}")

        print("1. Loading fixtures...")
        fixtures = load_fixtures(fixture_path)

        print("2. Computing bounds...")
        report = survivors(
            fixtures, q_list, subset, r, d, twist_mode,
            small_primes=self.config.elimination_config['small_primes'],
            factor_limit=self.config.elimination_config['factor_limit'],
            store=self.store,
            workers=self.options.workers,
        )

        summary = []
        for entry in report.entries:
            if entry.cm_obstruction:
                line = f"{entry.label}: all primes survive (CM obstruction)"
            elif entry.all_survive:
                line = f"{entry.label}: all primes survive"
            else:
                line = f"{entry.label}: survivors {entry.survivors}" + (" (eliminated)" if entry.eliminated else "")
            summary.append(line)
            print(f"   {line}")
        arguments = {'r': r, 'd': d, 'fixtures': fixture_path, 'q_list': list(q_list),
                     'subset': list(parse_subset(subset, r)), 'twist': twist_mode}
        return self._finish('eliminate', arguments, {'bounds': report}, summary)

    def refined(self, fixture_path: str, p: int, q: int, case_mode: str = 'plain', d: int = 1,
                subset: Optional[Any] = None) -> Dict[str, Any]:
        print(f"Refined elimination of p={p} at q={q}")
        fixtures = load_fixtures(fixture_path)
        reports = []
        for i, fx in enumerate(fixtures, start=1):
            print(f"{i}. {fx.label}...")
            report = refined_eliminate(fx, p, q, case_mode, d, subset, self.store)
            reports.append({'label': fx.label, 'report': report})
            print(f"   {report.verdict}: accepted pairs {report.accepted_pairs()}")
        summary = [f"{item['label']}: {item['report'].verdict}" for item in reports]
        arguments = {'fixtures': fixture_path, 'p': p, 'q': q, 'case': case_mode, 'd': d, 'subset': subset}
        return self._finish('refined', arguments, {'reports': reports}, summary)

    def _load_units(self, r: int, units_path: Optional[str]):
        if units_path is None:
            return self.config.units_for(r)
        with open(units_path, 'r', encoding='utf-8') as f:
            vectors = json.load(f)
        field = cyclo_field(r)
        return [field.element([int(c) for c in vector]) for vector in vectors]

    def _finish(self, command: str, arguments: Dict[str, Any], outputs: Dict[str, Any],
                summary: List[str], failed: bool = False) -> Dict[str, Any]:
        result = {
            'tool': TOOL_NAME,
            'version': __version__,
            'command': command,
            'config': self.config.as_dict(),
            'arguments': arguments,
            'outputs': outputs,
            'status': 'certificate-failure' if failed else 'ok',
        }
        payload = _jsonable(result)
        canonical = json.dumps(payload, sort_keys=True, ensure_ascii=False)
        digest = hashlib.sha256(canonical.encode('utf-8')).hexdigest()[:12]
        payload['timestamp'] = datetime.now().isoformat()

        artifact = self._save_summary_report(command, digest, payload, summary)
        payload['artifact'] = str(artifact)
        return payload

    def _save_summary_report(self, command: str, digest: str, payload: Dict[str, Any],
                             summary: List[str]) -> Path:
        """Write the JSON artifact and, if enabled, a Markdown summary next to it."""
        out_dir = Path(self.output_config.get('artifact_dir', './artifacts'))
        out_dir.mkdir(parents=True, exist_ok=True)
        report_path = out_dir / f"{command}-{digest}.json"

        with open(report_path, 'w', encoding='utf-8') as f:
            json.dump(payload, f, indent=2, ensure_ascii=False, sort_keys=True)

        if self.output_config.get('markdown_report', True):
            md_path = report_path.with_suffix('.md')
            with open(md_path, 'w', encoding='utf-8') as f:
                f.write(REPORT_TEMPLATE.render(
                    command=command,
                    timestamp=payload['timestamp'],
                    status=payload['status'],
                    artifact=report_path.name,
                    arguments=payload['arguments'],
                    summary=summary,
                ))
        logger.info("artifact written to %s", report_path)
        return report_path


def _prime_factors(n: int) -> List[int]:
    return sorted(factorint(abs(n)))
