"""
Command line front end for RobustLM
"""
import argparse
import io
import json
import logging
import math
import os
import sys
from dataclasses import dataclass

import numpy as np
import pandas as pd

from arfima import ArfimaSpec, TimeSeries, simulate_arfima
from autocovariance import acf_curve
from constants import (
    DATA_DIR, DEFAULT_ALPHA, DEFAULT_BETA, EXIT_INPUT, EXIT_OK, EXIT_REFUSED,
    MIN_ESTIMATE_LENGTH, MISSING_TOKENS, REPORT_DIR, STUDY_OUTLIERS, TITLE, VERSION, WINDOW_TYPES
)
from contamination import OutlierSpec, contaminate, mean_modified
from errors import ConfigError, InputError, RobustLMError, SpecError
from estimators import BandwidthSpec, estimate
from experiments import configs_from_payload, run_grid
from reporting import report_frame, save_report
from spectral import (
    WindowSpec, fourier_grid, hurvich_beltrao_L, hurvich_beltrao_Lstar, periodogram,
    robust_pseudo_periodogram
)
from utils import configure_logging, resource_path

logger = logging.getLogger(__name__)

FLOAT_FORMAT = '%.17g'  # round-trips every double


@dataclass
class DatasetFile:
    """A CSV column turned into a TimeSeries; '#' lines are comments, header optional"""

    path: str
    column: str = None
    header: str = 'auto'  # 'auto', 'yes' or 'no'

    def _lines(self):
        try:
            if self.path == '-':
                text = sys.stdin.read()
            else:
                with open(self.path, 'r') as f:
                    text = f.read()
        except FileNotFoundError as e:
            raise InputError(f"{self.path}: no such file") from e
        except (OSError, UnicodeDecodeError) as e:
            raise InputError(f"{self.path}: {e}") from e

        lines = [line for line in text.splitlines() if not line.lstrip().startswith('#')]
        while lines and not lines[-1].strip():
            lines.pop()
        return lines

    def _read(self):
        lines = self._lines()
        if not lines:
            raise InputError(f"{self.path}: no data")
        try:
            return pd.read_csv(io.StringIO('\n'.join(lines) + '\n'), header=None, dtype=str,
                               skip_blank_lines=False, keep_default_na=False)
        except pd.errors.EmptyDataError as e:
            raise InputError(f"{self.path}: no data") from e
        except pd.errors.ParserError as e:
            raise InputError(f"{self.path}: {e}") from e

    def _has_header(self, first):
        if self.header != 'auto':
            return self.header == 'yes'
        # a missing value in the first row is data, not a column name
        return any(not _is_number(cell) and cell.lower() not in MISSING_TOKENS for cell in first)

    def load(self):
        """Parse the selected column; non-numeric, blank or missing rows are listed in the error"""
        table = self._read()
        first = ['' if pd.isna(cell) else str(cell).strip() for cell in table.iloc[0]]
        has_header = self._has_header(first)
        header = first if has_header else None
        rows = table.iloc[1:] if has_header else table

        index = self._column_index(header, table.shape[1])
        values, bad = [], []
        for row, text in enumerate(rows.iloc[:, index], start=1):
            text = '' if pd.isna(text) else str(text).strip()
            if not _is_number(text) or not math.isfinite(float(text)):
                bad.append(row)
                continue
            values.append(float(text))

        if bad:
            shown = ', '.join(str(r) for r in bad[:20])
            raise InputError(f"{self.path}: non-numeric or missing values in data rows {shown}"
                             + (' ...' if len(bad) > 20 else ''))
        if not values:
            raise InputError(f"{self.path}: column has no values")
        return TimeSeries(np.array(values), {'source': self.path})

    def _column_index(self, header, width):
        if self.column is None:
            return 0
        if header is not None and self.column in header:
            return header.index(self.column)
        if self.column.isdigit() and int(self.column) < width:
            return int(self.column)
        raise InputError(f"{self.path}: no column {self.column!r}")


def _is_number(text):
    try:
        float(text)
    except (TypeError, ValueError):
        return False
    return True


def write_series(path, columns, comments=()):
    """Write comment lines and a CSV table; '-' is stdout"""
    frame = pd.DataFrame(columns)
    buffer = io.StringIO()
    for line in comments:
        buffer.write(f"# {line}\n")
    frame.to_csv(buffer, index=False, float_format=FLOAT_FORMAT)

    if path in (None, '-'):
        sys.stdout.write(buffer.getvalue())
        return
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    with open(path, 'w') as f:
        f.write(buffer.getvalue())
    logger.info("wrote %d rows to %s", len(frame), path)


def print_frame(frame):
    """Plot-ready CSV on stdout"""
    sys.stdout.write(frame.to_csv(index=False, float_format=FLOAT_FORMAT))


def _spec_from_args(args):
    return ArfimaSpec(args.d, tuple(args.phi), tuple(args.theta), args.sigma2, args.mu)


def _outliers_from_args(args):
    entries = args.outlier if args.outlier else STUDY_OUTLIERS
    return OutlierSpec(tuple(tuple(entry) for entry in entries))


def _window_label(method, kind):
    tag = WINDOW_TYPES[kind]['tag']
    return 'GPHR' + (f"_{tag}" if tag else '') if method == 'gphr' else 'GPH'


def cmd_simulate(args):
    """Simulate an ARFIMA path to CSV"""
    spec = _spec_from_args(args)
    series = simulate_arfima(spec, args.n, args.seed, args.integrate)
    comments = [
        f"{TITLE} {VERSION} simulate",
        f"model {spec.describe()}",
        f"n={args.n} seed={args.seed} integrate={args.integrate}",
    ]
    write_series(args.out, {'value': series.values}, comments)
    return EXIT_OK


def cmd_contaminate(args):
    """Add additive outliers to a series"""
    series = DatasetFile(args.input, args.column, args.header).load()
    outliers = _outliers_from_args(args)
    result = contaminate(series, outliers, args.seed)
    entries = ' '.join(f"({w:g}, {p:g})" for w, p in outliers.entries)
    comments = [
        f"{TITLE} {VERSION} contaminate {args.input}",
        f"outliers {entries} seed={args.seed} shocks={result.hit_count}",
    ]
    write_series(args.out, {'value': result.values, 'shock': result.shocks}, comments)
    return EXIT_OK


def cmd_acf(args):
    """Classical and robust autocorrelations, one row per lag"""
    series = DatasetFile(args.input, args.column, args.header).load()
    max_lag = args.max_lag if args.max_lag is not None else min(series.n - 2, 40)
    columns = {'lag': np.arange(max_lag + 1)}
    for method in ('classical', 'robust'):
        if args.method in (method, 'both'):
            columns[method] = acf_curve(series, max_lag, method)
    print_frame(pd.DataFrame(columns))
    return EXIT_OK


def cmd_spectrum(args):
    """Periodogram and robust pseudo-periodogram on the Fourier grid"""
    series = DatasetFile(args.input, args.column, args.header).load()
    grid = fourier_grid(series.n)
    columns = {'j': grid.indices, 'omega': grid.frequencies}
    if args.method in ('periodogram', 'both'):
        columns['periodogram'] = periodogram(series, grid).values
    if args.method in ('robust', 'both'):
        window = WindowSpec(args.window, args.M, args.beta)
        estimate_ = robust_pseudo_periodogram(series, window, grid=grid)
        columns['robust'] = estimate_.values
        if estimate_.nonpositive:
            logger.warning("pseudo-periodogram has %d non-positive values", estimate_.nonpositive)
    print_frame(pd.DataFrame(columns))
    return EXIT_OK


def estimate_rows(series, methods, alphas, windows, m=None, M=None, beta=DEFAULT_BETA,
                  differenced=False):
    """One result row per (alpha, estimator, window)"""
    rows = []
    for alpha in alphas:
        bandwidth = BandwidthSpec(alpha, m)
        for method in methods:
            kinds = windows if method == 'gphr' else [None]
            for kind in kinds:
                window = WindowSpec(kind, M, beta) if kind else None
                fit = estimate(series, method, bandwidth, window, differenced=differenced)
                row = {'label': _window_label(method, kind or 'truncated'), 'alpha': alpha}
                row.update(fit.summary())
                rows.append(row)
    return rows


def cmd_estimate(args):
    """GPH / GPHR estimates of d for one series"""
    series = DatasetFile(args.input, args.column, args.header).load()
    if series.n < MIN_ESTIMATE_LENGTH:
        raise InputError(f"{args.input}: {series.n} observations, at least {MIN_ESTIMATE_LENGTH} needed")

    methods = ['gph', 'gphr'] if args.method == 'both' else [args.method]
    rows = estimate_rows(series, methods, args.alpha, args.window, args.m, args.M, args.beta,
                         args.difference)
    if args.json:
        print(json.dumps(rows, indent=2))
    else:
        frame = pd.DataFrame(rows)[['label', 'alpha', 'd_hat', 'se_ols', 'se_asymptotic',
                                    'm_used', 'M', 'dropped']]
        print(frame.to_string(index=False))
    return EXIT_OK


def cmd_modify_mean(args):
    """Replace observations by the mean of the original series"""
    series = DatasetFile(args.input, args.column, args.header).load()
    modified = mean_modified(series, args.indices)
    comments = [
        f"{TITLE} {VERSION} modify-mean {args.input}",
        f"replaced={modified.metadata['replaced']} mean={series.values.mean()!r}",
    ]
    write_series(args.out, {'value': modified.values}, comments)
    return EXIT_OK


def load_mc_payload(path):
    """Read an mc configuration file, reporting JSON syntax errors by line and column"""
    if not os.path.exists(path):
        bundled = resource_path(DATA_DIR, path)
        if os.path.exists(bundled):
            path = bundled
    try:
        with open(path, 'r') as f:
            return json.load(f)
    except json.JSONDecodeError as e:
        raise ConfigError(f"{path}: line {e.lineno} column {e.colno}: {e.msg}") from e
    except OSError as e:
        raise ConfigError(f"{path}: {e}") from e


def cmd_mc(args):
    """Run a simulation table or a custom grid and write CSV / JSON reports"""
    if args.config:
        payload = load_mc_payload(args.config)
    elif args.table is not None:
        payload = {'table': args.table}
    else:
        raise ConfigError("mc needs a configuration file or --table")
    if args.scale is not None:
        payload['scale' if 'table' in payload else 'replicates'] = args.scale
    if args.master_seed is not None:
        payload['master_seed'] = args.master_seed
    if args.sample_sizes:
        payload['sample_sizes'] = args.sample_sizes

    configs, metadata = configs_from_payload(payload)
    report = run_grid(configs, args.threads, **metadata)

    name = f"table{metadata['table']}" if metadata['table'] else 'custom'
    prefix = args.out or payload.get('output') or os.path.join(REPORT_DIR, name)
    csv_path, json_path = save_report(report, prefix)

    frame = report_frame(report)[['label', 'd', 'n', 'mean', 'sd', 'bias', 'mse',
                                  'replicates', 'failures']]
    print(frame.to_string(index=False))
    print(f"\nreports: {csv_path}, {json_path}")
    return EXIT_OK


def cmd_diagnostics(args):
    """Limits L_j(d), L*_j(d) and the quadratic-form weights of I/f"""
    rows = []
    for j in args.j:
        level = hurvich_beltrao_L(j, args.d)
        cross = hurvich_beltrao_Lstar(j, args.d)
        rows.append({'j': j, 'L': level, 'Lstar': cross,
                     'alpha1': level - 2.0 * cross, 'alpha2': level + 2.0 * cross})
    print_frame(pd.DataFrame(rows))
    return EXIT_OK


def _add_input(parser):
    parser.add_argument('input', help="CSV file ('-' for stdin)")
    parser.add_argument('--column', default=None, help="column name or 0-based index (default 0)")
    parser.add_argument('--header', choices=['auto', 'yes', 'no'], default='auto',
                        help="first row holds column names (auto: only if it has a non-numeric name)")


def _add_window(parser, multiple=False):
    if multiple:
        parser.add_argument('--window', nargs='+', default=['truncated'], choices=sorted(WINDOW_TYPES))
    else:
        parser.add_argument('--window', default='truncated', choices=sorted(WINDOW_TYPES))
    parser.add_argument('--M', type=int, default=None, help="truncation point (default floor(n^beta))")
    parser.add_argument('--beta', type=float, default=DEFAULT_BETA)


def build_parser():
    """Argument parser with one subcommand per workflow step"""
    parser = argparse.ArgumentParser(
        prog='robustlm',
        description="Robust estimation of the memory parameter of ARFIMA series with additive outliers",
    )
    parser.add_argument('--version', action='version', version=f"{TITLE} {VERSION}")
    parser.add_argument('-v', '--verbose', action='count', default=0)
    parser.add_argument('--threads', type=int, default=None,
                        help="worker processes for mc (default $ROBUSTLM_THREADS or 1)")
    commands = parser.add_subparsers(dest='command', required=True)

    simulate = commands.add_parser('simulate', help="simulate an ARFIMA(p,d,q) path")
    simulate.add_argument('--d', type=float, required=True)
    simulate.add_argument('--phi', type=float, nargs='*', default=[])
    simulate.add_argument('--theta', type=float, nargs='*', default=[])
    simulate.add_argument('--sigma2', type=float, default=1.0)
    simulate.add_argument('--mu', type=float, default=0.0)
    simulate.add_argument('--n', type=int, required=True)
    simulate.add_argument('--seed', type=int, required=True)
    simulate.add_argument('--integrate', type=int, default=0,
                          help="integer integrations; the stationary core has memory d - integrate")
    simulate.add_argument('--out', default='-')
    simulate.set_defaults(handler=cmd_simulate)

    contaminate_ = commands.add_parser('contaminate', help="add additive outliers")
    _add_input(contaminate_)
    contaminate_.add_argument('--outlier', type=float, nargs=2, action='append',
                              metavar=('MAGNITUDE', 'PROBABILITY'),
                              help="outlier type, repeatable (default 10 0.05)")
    contaminate_.add_argument('--seed', type=int, required=True)
    contaminate_.add_argument('--out', default='-')
    contaminate_.set_defaults(handler=cmd_contaminate)

    acf = commands.add_parser('acf', help="classical and robust autocorrelations")
    _add_input(acf)
    acf.add_argument('--max-lag', type=int, default=None)
    acf.add_argument('--method', choices=['classical', 'robust', 'both'], default='both')
    acf.set_defaults(handler=cmd_acf)

    spectrum = commands.add_parser('spectrum', help="periodogram and robust pseudo-periodogram")
    _add_input(spectrum)
    _add_window(spectrum)
    spectrum.add_argument('--method', choices=['periodogram', 'robust', 'both'], default='both')
    spectrum.set_defaults(handler=cmd_spectrum)

    estimate_ = commands.add_parser('estimate', help="GPH / GPHR estimates of d")
    _add_input(estimate_)
    estimate_.add_argument('--method', choices=['gph', 'gphr', 'both'], default='both')
    estimate_.add_argument('--alpha', type=float, nargs='+', default=[DEFAULT_ALPHA])
    estimate_.add_argument('--m', type=int, default=None, help="explicit bandwidth m'")
    _add_window(estimate_, multiple=True)
    estimate_.add_argument('--difference', action='store_true',
                           help="estimate on first differences and add 1")
    estimate_.add_argument('--json', action='store_true')
    estimate_.set_defaults(handler=cmd_estimate)

    modify = commands.add_parser('modify-mean', help="replace observations by the series mean")
    _add_input(modify)
    modify.add_argument('--indices', type=int, nargs='*', default=[], help="0-based indices")
    modify.add_argument('--out', default='-')
    modify.set_defaults(handler=cmd_modify_mean)

    mc = commands.add_parser('mc', help="Monte Carlo tables and custom grids")
    mc.add_argument('config', nargs='?', default=None,
                    help="JSON configuration (e.g. table1.json from the data directory)")
    mc.add_argument('--table', type=int, choices=[1, 2, 3], default=None)
    mc.add_argument('--scale', type=int, default=None, help="replicates per cell")
    mc.add_argument('--master-seed', type=int, default=None)
    mc.add_argument('--sample-sizes', type=int, nargs='+', default=None)
    mc.add_argument('--out', default=None, help="report path prefix")
    mc.set_defaults(handler=cmd_mc)

    diagnostics = commands.add_parser('diagnostics', help="normalized periodogram limits")
    diagnostics.add_argument('--d', type=float, required=True)
    diagnostics.add_argument('--j', type=int, nargs='+', default=[1, 2, 5])
    diagnostics.set_defaults(handler=cmd_diagnostics)

    return parser


def main(argv=None):
    """Entry point; returns the process exit code"""
    parser = build_parser()
    args = parser.parse_args(argv)
    configure_logging(args.verbose)
    try:
        return args.handler(args)
    except (InputError, ConfigError, SpecError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except RobustLMError as e:
        print(f"refused: {e}", file=sys.stderr)
        return EXIT_REFUSED
