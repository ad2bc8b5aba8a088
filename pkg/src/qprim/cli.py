#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Command-line surface for qprim.

Features:
- validate / analyze / index / classical / mps on JSON inputs or --gen specs
- deterministic JSON reports on stdout, logs on stderr
- seeded Wielandt-bound sweeps over random channels, CSV output
- exit codes: 0 success, 1 invalid input, 2 numerical or internal failure
"""

import argparse
import logging
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from contextlib import contextmanager
from typing import Dict, Optional, Sequence

import numpy as np
import pandas as pd

from qprim import io
from qprim.channel import KrausChannel, StochasticMatrix, classical_embed, validate
from qprim.config import load_config, policy_from_config
from qprim.errors import (GaugeFailure, InvalidInput, QprimError,
                          ReportInconsistency)
from qprim.generators import GeneratorSpec, named_channel, random_channel
from qprim.indices import analyze_primitivity, classical_exponent
from qprim.mps import (MpsTensor, gamma_rank, injectivity_length, normalize_tensor,
                       parent_kernel_dim)
from qprim.spectral import classify_primitivity, spectral_report, zero_error_classify

logger = logging.getLogger(__name__)

LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'
SWEEP_COLUMNS = ['seed', 'D', 'd', 'i', 'q_lower', 'q_upper', 'thm1_case', 'thm1_bound', 'bound_respected']
SWEEP_D_CHOICES = (2, 3, 4)


def as_channel(obj, pol) -> KrausChannel:
    """Stochastic matrices are embedded; tensors are read as their raw Kraus map."""
    if isinstance(obj, StochasticMatrix):
        return classical_embed(obj, pol)
    if isinstance(obj, MpsTensor):
        return KrausChannel.from_kraus(obj.matrices, pol)
    return obj


class AnalysisPipeline:
    """One configured analysis run: tolerance policy, search parameters and input handling"""

    def __init__(self, config_path: Optional[str] = None, effort: Optional[int] = None,
                 samples: Optional[int] = None, seed: Optional[int] = None, exact: bool = False,
                 timing: bool = False):
        self.config = load_config(config_path)
        self.pol = policy_from_config(self.config)
        analysis = self.config['analysis']
        self.effort = int(effort if effort is not None else analysis['effort'])
        self.samples = int(samples if samples is not None else analysis['samples'])
        self.seed = int(seed if seed is not None else analysis['seed'])
        self.exact = bool(exact or analysis['exact'])
        self.timing = timing
        self.timings: Dict[str, float] = {}
        for name, value in (('effort', self.effort), ('samples', self.samples)):
            if value < 1:
                raise InvalidInput(f"{name} must be >= 1, got {value}")

    @contextmanager
    def stage(self, name: str):
        logger.info(f"Stage {name}")
        start = time.perf_counter()
        try:
            yield
        finally:
            self.timings[name] = time.perf_counter() - start

    def load(self, path: Optional[str], gen: Optional[str]):
        """Input object and its digest, from a file or a generator spec."""
        with self.stage('load'):
            if gen is not None:
                obj = named_channel(GeneratorSpec.parse(gen), self.pol)
                return obj, io.digest(io.encode(io.to_payload(obj)))
            if path is None:
                raise InvalidInput("Give an input file or --gen name:key=val,...")
            payload, content_digest = io.read_json(path)
            return io.from_payload(payload, self.pol), content_digest

    def _settings(self) -> dict:
        return {
            'tolerances': self.pol.to_dict(),
            'effort': self.effort,
            'samples': self.samples,
            'seed': self.seed,
            'exact': self.exact,
        }

    def _primitivity(self, ch: KrausChannel):
        try:
            return analyze_primitivity(ch, self.effort, self.samples, self.seed, self.pol, self.exact)
        except InvalidInput as e:
            if not self.exact:
                raise
            logger.warning(f"Exact mode unavailable ({e}); falling back to floating point")
            self.exact = False
            return analyze_primitivity(ch, self.effort, self.samples, self.seed, self.pol, False)

    def validate(self, obj) -> dict:
        if isinstance(obj, StochasticMatrix):
            return {'kind': 'stochastic', 'D': obj.dim_D, 'column_stochastic': True}
        if isinstance(obj, MpsTensor):
            return {'kind': 'tensor', 'd': obj.phys_d, 'D': obj.bond_D}
        return {'kind': 'channel', 'D': obj.dim_D, **validate(obj, self.pol).to_dict()}

    def analyze(self, obj, input_digest: str) -> dict:
        ch = as_channel(obj, self.pol)
        with self.stage('validation'):
            validation = validate(ch, self.pol)
        with self.stage('spectral'):
            spectral = spectral_report(ch, self.pol)
            verdict = classify_primitivity(ch, self.pol, spectral)
        with self.stage('indices'):
            prim = self._primitivity(ch)
        if verdict.primitive != (prim.i_index is not None):
            raise ReportInconsistency(
                f"Spectral verdict {verdict} but i = {prim.i_index}; refusing to emit the report")
        with self.stage('zero_error'):
            zero_error = zero_error_classify(ch, self.pol, spectral, q_upper=prim.q_upper,
                                             effort=self.effort, seed=self.seed)

        report = {
            'input_digest': input_digest,
            'settings': self._settings(),
            'validation': {'D': ch.dim_D, **validation.to_dict()},
            'spectral': spectral.to_dict(),
            'verdict': str(verdict),
            'primitivity': prim.to_dict(),
            'zero_error': zero_error.to_dict(),
        }
        if self.timing:
            report['timing'] = dict(self.timings)
        return report

    def index(self, obj) -> dict:
        ch = as_channel(obj, self.pol)
        with self.stage('indices'):
            prim = self._primitivity(ch)
        keys = ('i_index', 'q_lower', 'q_upper', 'q_exact', 'certificates')
        full = prim.to_dict()
        return {key: full[key] for key in keys}

    def classical(self, obj) -> dict:
        if not isinstance(obj, StochasticMatrix):
            raise InvalidInput("classical expects a stochastic matrix input")
        return {'p': classical_exponent(obj)}

    def mps(self, obj, gamma_L: Optional[int] = None) -> dict:
        if not isinstance(obj, MpsTensor):
            raise InvalidInput("mps expects a tensor input")
        try:
            normalize_tensor(obj, self.pol)
            gauge = 'TracePreserving'
        except GaugeFailure as e:
            gauge = f'Failed: {e}'
        try:
            length = injectivity_length(obj, self.pol, self.exact)
        except InvalidInput as e:
            if not self.exact:
                raise
            logger.warning(f"Exact mode unavailable ({e}); falling back to floating point")
            self.exact = False
            length = injectivity_length(obj, self.pol)
        out = {
            'd': obj.phys_d,
            'D': obj.bond_D,
            'gauge': gauge,
            'injectivity_length': length if length is not None else 'NeverInjective',
        }
        if gamma_L is not None:
            out['gamma'] = {
                'L': gamma_L,
                'rank': gamma_rank(obj, gamma_L, self.pol),
                'parent_kernel_dim': parent_kernel_dim(obj, gamma_L, self.pol),
            }
        return out

    def sweep_instance(self, seed: int, D: Optional[int], d: Optional[int]) -> dict:
        """One CSV row; D and d are drawn from the instance seed when not fixed."""
        rng = np.random.default_rng(seed)
        if D is None:
            choices = [c for c in SWEEP_D_CHOICES if d is None or c * c >= d]
            D = int(rng.choice(choices))
        if d is None:
            d = int(rng.integers(min(2, D * D), D * D + 1))
        ch = random_channel(D, d, seed, self.pol)
        prim = analyze_primitivity(ch, self.effort, self.samples, seed, self.pol)
        verdict = classify_primitivity(ch, self.pol)
        if verdict.primitive != (prim.i_index is not None):
            raise ReportInconsistency(f"Sweep seed {seed}: spectral verdict {verdict} but i = {prim.i_index}")
        logger.info(f"Sweep seed {seed}: D={D} d={ch.d} i={prim.i_index}")
        return {
            'seed': seed,
            'D': D,
            'd': ch.d,
            'i': prim.i_index,
            'q_lower': prim.q_lower,
            'q_upper': prim.q_upper,
            'thm1_case': prim.thm1_case.value,
            'thm1_bound': prim.thm1_bound,
            'bound_respected': prim.bound_respected,
        }

    def sweep(self, count: int, seed: int, D: Optional[int] = None, d: Optional[int] = None,
              jobs: int = 1) -> pd.DataFrame:
        if count < 1 or jobs < 1:
            raise InvalidInput(f"count and jobs must be >= 1, got {count} and {jobs}")
        if D is not None and D < 1:
            raise InvalidInput(f"D must be >= 1, got {D}")
        if d is not None and (d < 1 or (D is not None and d > D * D)
                              or (D is None and d > max(SWEEP_D_CHOICES) ** 2)):
            raise InvalidInput(f"d = {d} is out of range")
        if self.exact:
            logger.warning("--exact is ignored by sweep: random channels have irrational entries")
        seeds = [seed + k for k in range(count)]
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(lambda s: self.sweep_instance(s, D, d), seeds))
        df = pd.DataFrame(rows, columns=SWEEP_COLUMNS)
        for col in ('i', 'q_lower', 'q_upper'):
            df[col] = df[col].astype('Int64')
        violations = int((~df['bound_respected']).sum())
        if violations:
            logger.error(f"{violations} instances violate their Wielandt bound")
        return df


def format_pretty(report: dict) -> str:
    prim = report['primitivity']
    spectral = report['spectral']
    lines = [
        f"input:        {report['input_digest']}",
        f"D:            {report['validation']['D']}   d: {report['validation']['d_independent']}"
        f"   trace preserving: {report['validation']['is_tp']}",
        f"verdict:      {report['verdict']}",
        f"radius:       {spectral['spectral_radius']:.6g}   |lambda_2|/r: {spectral['lambda2_modulus']:.6g}"
        f"   period: {spectral['period']}",
        f"i(A):         {prim['i_index']}",
        f"q(E):         [{prim['q_lower']}, {prim['q_upper']}]" + ('  exact' if prim['q_exact'] else ''),
        f"bound:        {prim['thm1_case']} <= {prim['thm1_bound']}   respected: {prim['bound_respected']}",
        f"zero error:   {report['zero_error']['case']} ({report['zero_error']['reason']})",
    ]
    for name, seconds in report.get('timing', {}).items():
        lines.append(f"time {name:<8} {seconds:.4f} s")
    return '\n'.join(lines)


def _common_options() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--config', type=str, default=None, help='Path to configuration file')
    common.add_argument('--verbose', action='store_true', help='Debug logging on stderr')
    common.add_argument('--exact', action='store_true', help='Exact Gaussian-rational rank decisions')
    common.add_argument('--effort', type=int, default=None, help='Restarts of the q lower-bound search')
    common.add_argument('--samples', type=int, default=None, help='Random combinations tried by the span witness')
    common.add_argument('--seed', type=int, default=None, help='Seed of all randomized searches')
    return common


def _input_options(parser: argparse.ArgumentParser):
    parser.add_argument('file', nargs='?', help='JSON input file')
    parser.add_argument('--gen', type=str, help='Generator spec name:key=val,...')


def build_parser() -> argparse.ArgumentParser:
    common = _common_options()
    parser = argparse.ArgumentParser(prog='qprim', description='Primitivity analysis of quantum channels')
    sub = parser.add_subparsers(dest='command', required=True)

    p = sub.add_parser('validate', parents=[common], help='Check an input file')
    _input_options(p)

    p = sub.add_parser('analyze', parents=[common], help='Full analysis report')
    _input_options(p)
    p.add_argument('--pretty', action='store_true', help='Human-readable text instead of JSON')
    p.add_argument('--timing', action='store_true', help='Include per-stage wall times')

    p = sub.add_parser('index', parents=[common], help='i and the q bracket only')
    _input_options(p)

    p = sub.add_parser('classical', parents=[common], help='Exponent of a stochastic matrix')
    _input_options(p)

    p = sub.add_parser('mps', parents=[common], help='MPS injectivity length')
    _input_options(p)
    p.add_argument('--gamma', type=int, default=None, metavar='L', help='Also report the rank of Gamma_L')

    p = sub.add_parser('sweep', parents=[common], help='Seeded sweep over random channels (CSV)')
    p.add_argument('--D', dest='D', type=int, default=None, help='Dimension (drawn from {2,3,4} if omitted)')
    p.add_argument('--d', dest='d', type=int, default=None, help='Kraus count (drawn if omitted)')
    p.add_argument('--count', type=int, default=100)
    p.add_argument('--jobs', type=int, default=1, help='Worker threads')
    return parser


def _configure_logging(verbose: bool):
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.WARNING,
        format=LOG_FORMAT,
        stream=sys.stderr,
    )
    if not verbose:
        logger.setLevel(logging.INFO)


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 0 if e.code in (0, None) else 1
    _configure_logging(args.verbose)

    try:
        pipeline = AnalysisPipeline(args.config, args.effort, args.samples, args.seed,
                                    args.exact, getattr(args, 'timing', False))
        if args.command == 'sweep':
            seed = args.seed if args.seed is not None else pipeline.seed
            df = pipeline.sweep(args.count, seed, args.D, args.d, args.jobs)
            sys.stdout.write(df.to_csv(index=False, lineterminator='\n'))
            return 0

        obj, input_digest = pipeline.load(args.file, args.gen)
        if args.command == 'validate':
            result = pipeline.validate(obj)
        elif args.command == 'analyze':
            result = pipeline.analyze(obj, input_digest)
            if args.pretty:
                print(format_pretty(result))
                return 0
        elif args.command == 'index':
            result = pipeline.index(obj)
        elif args.command == 'classical':
            result = pipeline.classical(obj)
        else:
            result = pipeline.mps(obj, args.gamma)
        print(io.encode(result))
        return 0

    except InvalidInput as e:
        logger.error(f"Invalid input: {e}")
        return 1
    except QprimError as e:
        logger.error(f"{type(e).__name__}: {e}")
        return 2
    except Exception as e:
        logger.critical(f"Internal failure: {e}", exc_info=args.verbose)
        return 2


run = main


if __name__ == "__main__":
    sys.exit(main())
