"""
Command-line entry point for steady-state entanglement in cascaded chiral-waveguide chains.
"""
import functools
import logging
import os
import sys

import click
import numpy as np

# Add the project root to the Python path
sys.path.insert(0, os.path.dirname(os.path.dirname(__file__)))

from src.models.operators import DensityMatrix, basis_state  # noqa: E402
from src.services.entanglement import pair_concurrence, purity  # noqa: E402
from src.services.figure_factory import FIGURE_IDS, reproduce_figure  # noqa: E402
from src.services.figures.base import FigureSettings  # noqa: E402
from src.services.lindblad_engine import evolve, steady_state  # noqa: E402
from src.services.model_builder import build_model  # noqa: E402
from src.services.optimizer import OptimizeSpec, optimize  # noqa: E402
from src.services.oracles import psi0, psi2, psi3, psiN_holepair, rate_estimates, singlet_population, verify_dark_state  # noqa: E402,E501
from src.services.sweep_manager import Axis, SweepSpec, sweep as run_sweep  # noqa: E402
from src.utils.config_parser import ConfigParser  # noqa: E402
from src.utils.errors import ConfigError, SolverError  # noqa: E402
from src.utils.result_table import ResultTable  # noqa: E402

logger = logging.getLogger(__name__)

EXIT_CHECK_FAILED = 1
EXIT_CONFIG = 2
EXIT_SOLVER = 3

CHAIN_KEYS = ('n', 'gamma', 'eta2', 'omega_a', 'omega_b', 'delta', 'j', 't1_us')


def config_options(command):
    """Chain, solver and output flags shared by every command."""
    options = [
        click.option('--config', 'config_path', type=click.Path(dir_okay=False), help='key = value config file'),
        click.option('--dump-config', is_flag=True, help='Print the merged config and exit'),
        click.option('--n', type=int, help='Sites per chain'),
        click.option('--gamma', type=float, help='Waveguide coupling rate'),
        click.option('--eta2', type=float, help='Waveguide transmission probability'),
        click.option('--omega-a', type=float, help='Drive on A1'),
        click.option('--omega-b', type=float, help='Drive on B1'),
        click.option('--delta', type=float, help='Detuning'),
        click.option('--j', 'j', type=str, help='Comma-separated hopping rates J12,J23,...'),
        click.option('--t1-us', type=float, help='Intrinsic T1 in us; switches frequencies to MHz'),
        click.option('--tol', type=float, help='Steady-state residual tolerance'),
        click.option('--budget', type=int, help='Grid size / evaluation budget'),
        click.option('--threads', type=int, help='Worker threads for sweeps'),
        click.option('--format', 'format', type=click.Choice(['csv', 'json']), help='Table format'),
        click.option('--plot', type=click.Choice(['none', 'svg']), help='Plot output'),
        click.option('--out-dir', type=str, help='Directory for all artifacts'),
    ]
    for option in reversed(options):
        command = option(command)
    return command


def handle_errors(command):
    """Map configuration errors to exit code 2 and solver errors to exit code 3."""
    @functools.wraps(command)
    def wrapper(*args, **kwargs):
        try:
            return command(*args, **kwargs)
        except ConfigError as e:
            click.echo(f'Config error ({e.key}): {e}' if e.key else f'Config error: {e}', err=True)
            sys.exit(EXIT_CONFIG)
        except SolverError as e:
            click.echo(f'Solver error: {e}', err=True)
            sys.exit(EXIT_SOLVER)
    return wrapper


def load_config(kwargs, defaults=None):
    """
    Build the RunConfig from --config and the flags; print it and exit when --dump-config is set.
    """
    config_path = kwargs.pop('config_path', None)
    dump = kwargs.pop('dump_config', False)
    if kwargs.get('j') is not None:
        kwargs['j'] = ConfigParser.convert({'j': kwargs['j']})['j']
    file_values = ConfigParser.read_file(config_path) if config_path else {}
    config = ConfigParser.build(file_values, kwargs, defaults)
    if dump:
        click.echo(ConfigParser.dump(config), nl=False)
        sys.exit(0)
    return config


def _units(config):
    return ('1/us', 'us') if config.absolute_units else ('gamma', '1/gamma')


def _write(table, config, name):
    path = table.save(config.out_dir, name, config.format)
    click.echo(f'Wrote {path}')


def _plot_table(table, config, name, x, ys, logx=False):
    if config.plot != 'svg':
        return
    import matplotlib
    matplotlib.use('Agg')
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(6.4, 4.8))
    for y in ys:
        ax.plot(table.frame[x], table.frame[y], label=y)
    if logx:
        ax.set_xscale('log')
    ax.set_xlabel(x)
    ax.grid(True, alpha=0.3)
    ax.legend(loc='best')
    path = os.path.join(config.out_dir, f'{name}.svg')
    fig.savefig(path, format='svg', bbox_inches='tight')
    plt.close(fig)
    click.echo(f'Wrote {path}')


@click.group()
@click.option('-v', '--verbose', count=True, help='-v for INFO, -vv for DEBUG logging')
def cli(verbose):
    """Steady-state entanglement of driven qubit chains coupled by a lossy chiral waveguide."""
    level = logging.WARNING if verbose == 0 else logging.INFO if verbose == 1 else logging.DEBUG
    logging.basicConfig(level=level, format='%(asctime)s %(levelname)s %(name)s: %(message)s')


@cli.command()
@config_options
@handle_errors
def steady(**kwargs):
    """Solve for the steady state and report its entanglement."""
    config = load_config(kwargs)
    spec = ConfigParser.to_chain_spec(config)
    result = steady_state(build_model(spec), tol=config.tol, compute_gap=True)
    rate_unit, time_unit = _units(config)

    row = {'residual': result.residual, 'gap': result.gap, 'purity': purity(result.rho)}
    for site in range(1, spec.n + 1):
        row[f'concurrence_{site}'] = pair_concurrence(result.rho, site)
    if spec.n == 1:
        click.echo(f'concurrence: {row["concurrence_1"]:.6f}')
    else:
        for site in range(1, spec.n + 1):
            click.echo(f'concurrence (pair {site}): {row[f"concurrence_{site}"]:.6f}')
        click.echo(f'outer-pair concurrence: {row[f"concurrence_{spec.n}"]:.6f}')
    click.echo(f'purity: {row["purity"]:.6f}')
    click.echo(f'residual: {result.residual:.3e}')
    click.echo(f'spectral gap: {result.gap:.6g} {rate_unit} (relaxation time {1.0 / result.gap:.6g} {time_unit})')
    _write(ResultTable.from_rows([row], metadata={'spec': spec.to_dict(), 'tol': config.tol}), config, 'steady')


@cli.command(name='evolve')
@config_options
@click.option('--t-max', type=float, default=50.0, show_default=True, help='Final time in units of 1/gamma')
@click.option('--points', type=int, default=201, show_default=True, help='Output times')
@handle_errors
def evolve_cmd(t_max, points, **kwargs):
    """Evolve from the all-ground state and record concurrence over time."""
    config = load_config(kwargs)
    spec = ConfigParser.to_chain_spec(config)
    if points < 2 or not t_max > 0:
        raise ConfigError('evolve needs t_max > 0 and at least two points', key='points')
    model = build_model(spec)
    times = np.linspace(0.0, t_max / spec.gamma, points)
    rho0 = DensityMatrix.from_pure(basis_state('0' * len(model.layout), model.layout))
    trace = evolve(model, rho0, times)

    table = ResultTable.from_rows([{'time': t} for t in trace.times],
                                  metadata={'spec': spec.to_dict(), 'max_trace_drift': trace.max_trace_drift})
    columns = []
    for site in range(1, spec.n + 1):
        name = f'concurrence_{site}'
        table.frame[name] = trace.metric(lambda rho, site=site: pair_concurrence(rho, site))
        columns.append(name)
    table.frame['purity'] = trace.metric(purity)
    click.echo(f'final concurrence (pair {spec.n}): {table.frame[columns[-1]].iloc[-1]:.6f} '
               f'at t = {times[-1]:.6g} {_units(config)[1]}')
    _write(table, config, 'evolve')
    _plot_table(table, config, 'evolve', 'time', columns)


@cli.command(name='sweep')
@config_options
@click.option('--axis', 'axes', multiple=True, required=True, help='name=spacing:start:stop:count (up to two)')
@click.option('--metric', 'metrics', multiple=True, help='Metric to record (repeatable)')
@handle_errors
def sweep_cmd(axes, metrics, **kwargs):
    """Steady-state metrics over one or two parameter axes."""
    config = load_config(kwargs)
    spec = SweepSpec(ConfigParser.to_chain_spec(config), tuple(Axis.parse(a) for a in axes),
                     metrics or ('concurrence',), config.tol, config.budget, config.threads)
    table = run_sweep(spec)
    failed = int((table.frame['status'] == 'failed').sum())
    click.echo(f'{len(table)} points, {failed} failed')
    _write(table, config, 'sweep')
    if len(spec.axes) == 1:
        _plot_table(table, config, 'sweep', spec.axes[0].name, list(spec.metrics), logx=True)


@cli.command(name='optimize')
@config_options
@click.option('--free', default='omega', show_default=True, help='Comma-separated free parameters')
@click.option('--seed-points', type=int, default=9, show_default=True, help='Seed grid points per parameter')
@handle_errors
def optimize_cmd(free, seed_points, **kwargs):
    """Maximize the steady-state concurrence over drives and hopping."""
    config = load_config(kwargs)
    spec = OptimizeSpec(ConfigParser.to_chain_spec(config), tuple(p.strip() for p in free.split(',') if p.strip()),
                        seed_points=seed_points, budget=config.budget, tol=config.tol, threads=config.threads)
    result = optimize(spec)
    click.echo(f'best {spec.objective}: {result.best_value:.6f}')
    for name, value in result.best_params.items():
        click.echo(f'  {name} = {value:.6g}')
    if result.budget_exhausted:
        click.echo('warning: evaluation budget exhausted, result is the best found so far')
    _write(result.table, config, 'optimize')


def _dark_state(spec):
    omega = spec.omega_a
    if spec.n == 1:
        return psi0(omega, spec.delta, spec.gamma)
    if spec.n == 2:
        return psi2(omega, spec.gamma, spec.j[0])
    if spec.n == 3:
        return psi3(omega, spec.gamma, spec.j[0], spec.j[1])
    return psiN_holepair(spec)


@cli.command()
@config_options
@handle_errors
def verify(**kwargs):
    """Check the closed-form dark state against the model's collapse operators and Hamiltonian."""
    config = load_config(kwargs)
    spec = ConfigParser.to_chain_spec(config)
    if spec.omega_a != spec.omega_b:
        raise ConfigError('dark states are defined for symmetric drives', key='omega_b')
    if spec.n >= 4 and (spec.eta != 1.0 or spec.delta != 0.0):
        raise ConfigError('hole-pair states need eta2 = 1 and delta = 0', key='eta2')
    try:
        state = _dark_state(spec)
    except ValueError as e:
        raise ConfigError(str(e), key='j') from e
    report = verify_dark_state(state, build_model(spec), tol=1e-9)

    rows = [{'check': f'collapse_{k}', 'norm': value} for k, value in enumerate(report.collapse_norms)]
    rows.append({'check': 'hamiltonian', 'norm': report.hamiltonian_norm})
    for row in rows:
        click.echo(f'{row["check"]}: {row["norm"]:.3e}')
    click.echo(f'energy: {report.energy:.3e}')
    click.echo('dark state: PASS' if report.passed else 'dark state: FAIL')
    _write(ResultTable.from_rows(rows, metadata={'spec': spec.to_dict(), 'report': report.to_dict()}),
           config, 'verify')
    if not report.passed:
        sys.exit(EXIT_CHECK_FAILED)


@cli.command()
@config_options
@handle_errors
def rates(**kwargs):
    """Singlet population, storage loss and relaxation rates of the 2+2 chain in the weak-drive limit."""
    config = load_config(kwargs)
    spec = ConfigParser.to_chain_spec(config)
    if spec.n != 2:
        raise ConfigError(f'rates are defined for the 2+2 chain, got n={spec.n}', key='n')
    omega, gamma, j12 = spec.omega_a, spec.gamma, spec.j[0]
    if not (omega > 0 and j12 > 0):
        raise ConfigError('rates need positive omega_a and j', key='omega_a')
    n1 = singlet_population(omega, gamma, j12)
    estimate = rate_estimates(omega, gamma, j12, spec.eta)
    rate_unit = _units(config)[0]
    row = {
        'singlet_population': n1,
        'omega_eff': 2.0 * omega * j12 / gamma,
        'gamma_eff': 4.0 * j12 ** 2 / gamma,
        'gamma_loss': estimate.gamma_loss,
        'gamma_rel': estimate.gamma_rel,
    }
    click.echo(f'singlet population <n1>: {n1:.6g}')
    click.echo(f'omega_eff: {row["omega_eff"]:.6g} {rate_unit}, gamma_eff: {row["gamma_eff"]:.6g} {rate_unit}')
    click.echo(f'Gamma_loss: {estimate.gamma_loss:.6g} {rate_unit}')
    click.echo(f'Gamma_rel: {estimate.gamma_rel:.6g} {rate_unit}')
    if estimate.gamma_loss > 0:
        click.echo(f'Gamma_rel / Gamma_loss: {estimate.gamma_rel / estimate.gamma_loss:.6g}')
    _write(ResultTable.from_rows([row], metadata={'spec': spec.to_dict()}), config, 'rates')


@cli.command()
@click.argument('figure_id', type=click.Choice(FIGURE_IDS))
@config_options
@click.option('--points-1d', type=int, default=41, show_default=True, help='Points per curve')
@click.option('--points-2d', type=int, default=31, show_default=True, help='Points per map axis')
@click.option('--seed-points', type=int, default=9, show_default=True, help='Optimizer seed points per parameter')
@handle_errors
def figure(figure_id, points_1d, points_2d, seed_points, **kwargs):
    """
    Reproduce a figure as a table plus an SVG plot.

    Every figure fixes its own chain parameters, so only the solver and output
    flags apply; chain flags are rejected.
    """
    for key in CHAIN_KEYS:
        if kwargs.get(key) is not None:
            raise ConfigError(f'--{key.replace("_", "-")} does not apply to figure reproduction', key=key)
    config = load_config(kwargs, defaults={'plot': 'svg'})
    if min(points_1d, points_2d, seed_points) < 2:
        raise ConfigError('figure grids need at least two points per axis', key='points')
    settings = FigureSettings(points_1d=points_1d, points_2d=points_2d, seed_points=seed_points,
                              budget=config.budget, threads=config.threads, tol=config.tol)
    table, path = reproduce_figure(figure_id, config.out_dir, settings, config.format, config.plot == 'svg')
    click.echo(f'{figure_id}: {len(table)} rows written to {config.out_dir}')
    if path:
        click.echo(f'Wrote {path}')


def main():
    cli()


if __name__ == '__main__':
    main()
