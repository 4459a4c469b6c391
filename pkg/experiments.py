"""
Monte Carlo harness for RobustLM

Every replicate simulates one base series, optionally contaminates it and then
fits every configured estimator to both versions (paired design). Cells report
mean, s.d., bias and MSE of the estimates.
"""
import logging
import math
import numbers
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from arfima import ArfimaSpec, simulate_arfima
from constants import (
    DEFAULT_ALPHA, DEFAULT_BETA, DEFAULT_MASTER_SEED, DEFAULT_REPLICATES,
    MAX_FAILURE_RATE, METHODS, MIN_TABLE_SCALE, TABLE_SETTINGS
)
from contamination import OutlierSpec, contaminate
from errors import ConfigError, MonteCarloError, RobustLMError, SpecError
from estimators import BandwidthSpec, estimate
from robust_scale import QnConfig
from spectral import WindowSpec
from utils import replicate_seeds, stable_sum, thread_count

logger = logging.getLogger(__name__)

CONTAMINATED_SUFFIX = '_c'


@dataclass
class EstimatorSpec:
    """One estimator column: label, method, bandwidth and (GPHR) lag window"""

    label: str
    method: str = 'gph'
    bandwidth: BandwidthSpec = field(default_factory=BandwidthSpec)
    window: WindowSpec = None

    def __post_init__(self):
        if self.method not in METHODS:
            raise ConfigError(f"estimator {self.label!r}: unknown method {self.method!r}")
        if self.method == 'gphr' and self.window is None:
            self.window = WindowSpec()

    def fit(self, series, config=None, differenced=False):
        """Estimate d on one series"""
        return estimate(series, self.method, self.bandwidth, self.window, config, differenced)

    @classmethod
    def from_settings(cls, entry, alpha=DEFAULT_ALPHA, beta=DEFAULT_BETA, path='estimator'):
        """Build from a settings dict such as TABLE_SETTINGS[...]['estimators'][k]"""
        if not isinstance(entry, dict) or 'label' not in entry:
            raise ConfigError(f"{path}: expected an object with a 'label' field")
        unknown = set(entry) - {'label', 'method', 'window', 'alpha', 'beta', 'm', 'M'}
        if unknown:
            raise ConfigError(f"{path}: unknown fields {sorted(unknown)}")
        try:
            bandwidth = BandwidthSpec(entry.get('alpha', alpha), entry.get('m'))
            window = None
            if entry.get('method', 'gph') == 'gphr':
                window = WindowSpec(entry.get('window', 'truncated'), entry.get('M'),
                                    entry.get('beta', beta))
            return cls(str(entry['label']), entry.get('method', 'gph'), bandwidth, window)
        except (SpecError, ConfigError, TypeError, ValueError) as exc:
            raise ConfigError(f"{path}: {exc}") from exc


@dataclass
class McConfig:
    """One (d, n) point of a simulation grid with all its estimators"""

    arfima: ArfimaSpec
    n: int
    estimators: tuple
    replicates: int = DEFAULT_REPLICATES
    outliers: OutlierSpec = None
    differencing: bool = False
    integrate: int = 0
    master_seed: int = DEFAULT_MASTER_SEED
    stream: tuple = ()
    qn: QnConfig = field(default_factory=QnConfig)

    def __post_init__(self):
        self.estimators = tuple(self.estimators)
        self.stream = tuple(int(k) for k in self.stream)
        if int(self.replicates) != self.replicates or self.replicates < 1:
            raise ConfigError(f"replicates must be a positive integer, got {self.replicates}")
        if int(self.n) != self.n or self.n < 4:
            raise ConfigError(f"series length must be an integer >= 4, got n={self.n}")
        if self.integrate < 0:
            raise ConfigError(f"integrate must be non-negative, got {self.integrate}")
        if not self.estimators:
            raise ConfigError("at least one estimator is required")
        labels = [e.label for e in self.estimators]
        if len(set(labels)) != len(labels):
            raise ConfigError(f"estimator labels must be unique, got {labels}")
        if not -0.5 < self.arfima.d - self.integrate < 0.5:
            raise ConfigError(
                f"d={self.arfima.d} with integrate={self.integrate} leaves a non-stationary core"
            )

    @property
    def true_d(self):
        """Memory parameter of the simulated (possibly integrated) series"""
        return self.arfima.d

    @property
    def offset(self):
        """Amount added to estimates by the difference-then-estimate workflow"""
        return 1.0 if self.differencing else 0.0

    @property
    def contaminated(self):
        """True when a contaminated copy of every base series is estimated too"""
        return self.outliers is not None and not self.outliers.is_clean()

    def levels(self):
        """Contamination levels evaluated per replicate"""
        return (False, True) if self.contaminated else (False,)


@dataclass
class McCell:
    """Aggregated estimates of one estimator on one (d, n, contamination) point"""

    cell_id: str
    estimator: str
    contaminated: bool
    d: float
    n: int
    mean: float
    sd: float
    bias: float
    mse: float
    replicates: int
    failures: int = 0
    dropped_mean: float = 0.0
    dropped_max: int = 0
    sd_defined: bool = True
    offset: float = 0.0

    @property
    def label(self):
        """Column label, GPH or GPH_c style"""
        return self.estimator + (CONTAMINATED_SUFFIX if self.contaminated else '')

    @property
    def differenced_mean(self):
        """Mean estimate on the differenced data"""
        return self.mean - self.offset


@dataclass
class McReport:
    """Cells of one Monte Carlo run plus run metadata"""

    cells: list = field(default_factory=list)
    metadata: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.cells)

    def extend(self, other):
        """Append the cells of another report"""
        self.cells.extend(other.cells)

    def cell(self, label, d=None, n=None, contaminated=None):
        """Look a cell up by label ('GPHR' or 'GPHR_c'), memory and sample size"""
        if contaminated is None:
            contaminated = label.endswith(CONTAMINATED_SUFFIX)
            if contaminated:
                label = label[:-len(CONTAMINATED_SUFFIX)]
        matches = [
            c for c in self.cells
            if c.estimator == label and c.contaminated == contaminated
            and (d is None or math.isclose(c.d, d, abs_tol=1e-12))
            and (n is None or c.n == n)
        ]
        if len(matches) != 1:
            raise KeyError(f"{len(matches)} cells match label={label!r} contaminated={contaminated} "
                           f"d={d} n={n}")
        return matches[0]


def cell_id(label, contaminated, d, n):
    """Stable identifier such as GPHR_c:d=0.3:n=300"""
    return f"{label}{CONTAMINATED_SUFFIX if contaminated else ''}:d={d:g}:n={n}"


def run_replicate(config, replicate):
    """
    Estimates of one replicate keyed by (label, contaminated): (d_hat, dropped)
    on success, the error message on failure.
    """
    simulation_seed, contamination_seed = replicate_seeds(
        config.master_seed, replicate, 2, config.stream
    )
    keys = [(e.label, level) for level in config.levels() for e in config.estimators]
    try:
        clean = simulate_arfima(config.arfima, config.n, simulation_seed, config.integrate)
    except RobustLMError as exc:
        return {key: f"simulation failed: {exc}" for key in keys}

    series = {False: clean}
    if config.contaminated:
        series[True] = contaminate(clean, config.outliers, contamination_seed).as_series()

    outcome = {}
    for level in config.levels():
        for estimator in config.estimators:
            try:
                fit = estimator.fit(series[level], config.qn, config.differencing)
                outcome[(estimator.label, level)] = (fit.d_hat, fit.dropped)
            except (RobustLMError, ArithmeticError) as exc:
                outcome[(estimator.label, level)] = str(exc)
    return outcome


def aggregate_cell(config, label, contaminated, outcomes):
    """Mean, s.d. (R - 1), bias and MSE over the successful replicates"""
    name = cell_id(label, contaminated, config.true_d, config.n)
    estimates, dropped, failures = [], [], 0
    for replicate, outcome in enumerate(outcomes):
        result = outcome[(label, contaminated)]
        if isinstance(result, str):
            failures += 1
            logger.warning("%s replicate %d failed: %s", name, replicate, result)
            continue
        estimates.append(result[0])
        dropped.append(result[1])

    total = len(outcomes)
    if failures > MAX_FAILURE_RATE * total:
        raise MonteCarloError(
            f"{name}: {failures} of {total} replicates failed "
            f"(limit {MAX_FAILURE_RATE:.0%})"
        )

    count = len(estimates)
    truth = config.true_d
    mean = stable_sum(estimates) / count
    sd_defined = count > 1
    sd = math.sqrt(stable_sum((x - mean) ** 2 for x in estimates) / (count - 1)) if sd_defined else 0.0
    mse = stable_sum((x - truth) ** 2 for x in estimates) / count

    return McCell(
        cell_id=name, estimator=label, contaminated=contaminated, d=truth, n=config.n,
        mean=mean, sd=sd, bias=mean - truth, mse=mse, replicates=count, failures=failures,
        dropped_mean=stable_sum(dropped) / count, dropped_max=int(max(dropped)),
        sd_defined=sd_defined, offset=config.offset,
    )


def run_monte_carlo(config, threads=None):
    """Run all replicates of one grid point and aggregate every cell"""
    workers = min(thread_count(threads), config.replicates)
    indices = range(config.replicates)
    if workers == 1:
        outcomes = [run_replicate(config, r) for r in indices]
    else:
        chunk = max(1, config.replicates // (4 * workers))
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(run_replicate, [config] * config.replicates, indices,
                                     chunksize=chunk))

    cells = [
        aggregate_cell(config, estimator.label, level, outcomes)
        for level in config.levels()
        for estimator in config.estimators
    ]
    for cell in cells:
        logger.info("%s mean=%.4f sd=%.4f mse=%.4f (%d replicates)",
                    cell.cell_id, cell.mean, cell.sd, cell.mse, cell.replicates)
    metadata = {
        'master_seed': config.master_seed,
        'paired': config.contaminated,
        'replicates': config.replicates,
    }
    return McReport(cells, metadata)


def run_grid(configs, threads=None, **metadata):
    """Run every grid point in order and collect the cells in one report"""
    report = McReport(metadata=dict(metadata))
    for config in configs:
        logger.info("running d=%g n=%d with %d replicates", config.true_d, config.n,
                    config.replicates)
        part = run_monte_carlo(config, threads)
        report.extend(part)
        report.metadata.setdefault('master_seed', part.metadata['master_seed'])
        report.metadata['paired'] = report.metadata.get('paired', False) or part.metadata['paired']
    return report


def _is_integer(value):
    return isinstance(value, numbers.Integral) and not isinstance(value, bool)


def _integer_list(values, path):
    if not isinstance(values, (list, tuple)) or not all(_is_integer(n) for n in values):
        raise ConfigError(f"{path}: expected a list of integers, got {values!r}")
    return [int(n) for n in values]


def _number_list(values, path):
    if not isinstance(values, (list, tuple)) or not all(
            isinstance(x, numbers.Real) and not isinstance(x, bool) for x in values):
        raise ConfigError(f"{path}: expected a list of numbers, got {values!r}")
    return [float(x) for x in values]


def _sample_sizes_for(sizes, d, path):
    if isinstance(sizes, dict):
        for key, value in sizes.items():
            try:
                memory = float(key)
            except (TypeError, ValueError) as exc:
                raise ConfigError(f"{path}.sample_sizes: key {key!r} is not a number") from exc
            if math.isclose(memory, d, abs_tol=1e-12):
                return _integer_list(value, f"{path}.sample_sizes[{key}]")
        raise ConfigError(f"{path}.sample_sizes: no entry for memory {d:g}")
    return _integer_list(sizes, f"{path}.sample_sizes")



def grid_configs(grid, replicates, master_seed=DEFAULT_MASTER_SEED, stream=(), path='grid'):
    """
    Expand a grid definition (the TABLE_SETTINGS layout) into one McConfig per (d, n).
    'memory' lists d of the stationary core; with 'integrate' k the simulated
    series has memory d + k.
    """
    if not isinstance(grid, dict):
        raise ConfigError(f"{path}: expected an object")
    known = {'title', 'memory', 'sample_sizes', 'estimators', 'outliers', 'integrate',
             'differencing', 'alpha', 'beta', 'phi', 'theta', 'sigma2'}
    unknown = set(grid) - known
    if unknown:
        raise ConfigError(f"{path}: unknown fields {sorted(unknown)}")
    for required in ('memory', 'sample_sizes', 'estimators'):
        if required not in grid:
            raise ConfigError(f"{path}.{required}: missing")

    alpha = grid.get('alpha', DEFAULT_ALPHA)
    beta = grid.get('beta', DEFAULT_BETA)
    integrate_order = grid.get('integrate', 0)
    if not isinstance(integrate_order, int) or integrate_order < 0:
        raise ConfigError(f"{path}.integrate: expected a non-negative integer, got {integrate_order!r}")
    if not isinstance(grid['estimators'], list):
        raise ConfigError(f"{path}.estimators: expected a list of estimator objects")
    estimators = tuple(
        EstimatorSpec.from_settings(entry, alpha, beta, f"{path}.estimators[{k}]")
        for k, entry in enumerate(grid['estimators'])
    )
    try:
        outliers = OutlierSpec(tuple(tuple(entry) for entry in grid.get('outliers', ())))
    except (SpecError, TypeError, ValueError) as exc:
        raise ConfigError(f"{path}.outliers: {exc}") from exc

    configs = []
    for k, d in enumerate(_number_list(grid['memory'], f"{path}.memory")):
        for n in _sample_sizes_for(grid['sample_sizes'], d, path):
            try:
                spec = ArfimaSpec(float(d) + integrate_order, grid.get('phi', ()),
                                  grid.get('theta', ()), grid.get('sigma2', 1.0))
                configs.append(McConfig(
                    spec, n, estimators, replicates, outliers,
                    bool(grid.get('differencing', False)), integrate_order,
                    master_seed, tuple(stream) + (k, n),
                ))
            except (SpecError, ConfigError, TypeError, ValueError) as exc:
                raise ConfigError(f"{path}.memory[{k}]: {exc}") from exc
    return configs


def table_configs(table_id, scale=DEFAULT_REPLICATES, master_seed=DEFAULT_MASTER_SEED,
                  sample_sizes=None):
    """Grid points of a simulation table, optionally restricted to some sample sizes"""
    if not _is_integer(table_id) or table_id not in TABLE_SETTINGS:
        raise ConfigError(f"table: unknown table {table_id!r}; expected one of {sorted(TABLE_SETTINGS)}")
    if not _is_integer(scale) or scale < MIN_TABLE_SCALE:
        raise ConfigError(f"scale: expected an integer >= {MIN_TABLE_SCALE}, got {scale!r}")

    configs = grid_configs(TABLE_SETTINGS[table_id], int(scale), master_seed,
                           stream=(table_id,), path=f"table{table_id}")
    if sample_sizes:
        wanted = set(_integer_list(sample_sizes, 'sample_sizes'))
        configs = [c for c in configs if c.n in wanted]
        if not configs:
            raise ConfigError(f"table {table_id} has no cells with sample sizes {sorted(wanted)}")
    return configs


def reproduce_table(table_id, scale=DEFAULT_REPLICATES, master_seed=DEFAULT_MASTER_SEED,
                    threads=None, sample_sizes=None):
    """Full grid of a simulation table with the settings in TABLE_SETTINGS"""
    configs = table_configs(table_id, scale, master_seed, sample_sizes)
    return run_grid(configs, threads, table=table_id, title=TABLE_SETTINGS[table_id]['title'],
                    scale=int(scale), master_seed=master_seed)


def configs_from_payload(payload):
    """
    Grid points and report metadata of an mc configuration object, either
    {"table": 1, "scale": 1000, ...} or {"grid": {...}, "replicates": 500, ...}.
    """
    if not isinstance(payload, dict):
        raise ConfigError("mc configuration must be a JSON object")
    unknown = set(payload) - {'table', 'scale', 'master_seed', 'sample_sizes', 'grid',
                              'replicates', 'output'}
    if unknown:
        raise ConfigError(f"unknown fields {sorted(unknown)}")
    master_seed = payload.get('master_seed', DEFAULT_MASTER_SEED)
    if not _is_integer(master_seed) or master_seed < 0:
        raise ConfigError(f"master_seed: expected a non-negative integer, got {master_seed!r}")

    if ('table' in payload) == ('grid' in payload):
        raise ConfigError("exactly one of 'table' and 'grid' is required")
    if 'table' in payload:
        table_id = payload['table']
        scale = payload.get('scale', DEFAULT_REPLICATES)
        configs = table_configs(table_id, scale, master_seed, payload.get('sample_sizes'))
        metadata = {'table': table_id, 'title': TABLE_SETTINGS[table_id]['title'],
                    'scale': scale, 'master_seed': master_seed}
        return configs, metadata

    replicates = payload.get('replicates', DEFAULT_REPLICATES)
    if not _is_integer(replicates) or replicates < 1:
        raise ConfigError(f"replicates: expected a positive integer, got {replicates!r}")
    configs = grid_configs(payload['grid'], replicates, master_seed, path='grid')
    metadata = {'table': None, 'title': payload['grid'].get('title', 'custom grid'),
                'scale': replicates, 'master_seed': master_seed}
    return configs, metadata
