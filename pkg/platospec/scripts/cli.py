#
# (C) Copyright Cloudlab URV 2020
# (C) Copyright IBM Corp. 2023
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
#


import os
import sys
import math
import click
import logging
import functools
from tabulate import tabulate

from platospec.version import __version__
from platospec.utils import setup_platospec_logger
from platospec.config import ConfigError, default_config, load_yaml_config
from platospec.graph import GraphError, load_graph
from platospec.platonic import Solid, build_platonic
from platospec.coupling import CouplingAssignment, CouplingError, CouplingSpec, load_coupling_file
from platospec.secular import SecularError, SecularSystem
from platospec.rootfind import RootFindError, RootFindOpts, scan_spectrum
from platospec.executor import SweepExecutor
from platospec.oracles import OracleKind, oracle_union_spectrum
from platospec.asymptotics import (AsymptoticsError, CenterFamily, ClusterTarget,
                                   check_theorem, kirchhoff_drift, window_cap)
from platospec.export import ExportError, read_spectrum, write_report, write_spectrum, write_table

logger = logging.getLogger(__name__)

EXIT_FAILED_CHECK = 1
EXIT_INPUT_ERROR = 2
EXIT_NOT_CONVERGED = 3

INPUT_ERRORS = (ConfigError, GraphError, CouplingError, SecularError, RootFindError,
                AsymptoticsError, ExportError, FileNotFoundError)

DEFAULT_DRIFT_WINDOWS = ((10.0, 10.0 + 4 * math.pi), (40.0, 40.0 + 4 * math.pi))


def exit_on_error(func):
    """ Maps input and configuration errors to exit code 2 """
    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except INPUT_ERRORS as e:
            logger.error(str(e))
            sys.exit(EXIT_INPUT_ERROR)
    return wrapper


def parse_window(text):
    if text is None:
        return None
    lo, sep, hi = str(text).partition(':')
    try:
        window = (float(lo), float(hi))
    except ValueError:
        raise click.BadParameter(f"'{text}' is not a lo:hi window")
    if not sep or not 0 <= window[0] < window[1] or not all(math.isfinite(x) for x in window):
        raise click.BadParameter(f"'{text}' is not a well-ordered lo:hi window")
    return window


def _window_callback(ctx, param, value):
    if isinstance(value, tuple):
        return tuple(parse_window(v) for v in value)
    return parse_window(value)


def set_config_ow(workers=None, scan_step=None, tol_accept=None, promote_tol=None,
                  merge_tol=None, max_refine_iters=None):
    config_ow = {'platospec': {}, 'solver': {}}

    if workers:
        config_ow['platospec']['worker_processes'] = workers

    for key, value in (('scan_step', scan_step), ('tol_accept', tol_accept), ('promote_tol', promote_tol),
                       ('merge_tol', merge_tol), ('max_refine_iters', max_refine_iters)):
        if value is not None:
            config_ow['solver'][key] = value

    return config_ow


def solver_options(func):
    """ Options shared by every command that runs a k-sweep """
    options = [
        click.option('--config', '-c', default=None, help='Path to yaml config file', type=click.Path(exists=True)),
        click.option('--debug', '-d', is_flag=True, help='Debug mode'),
        click.option('--workers', '-w', default=None, type=int, help='Number of worker threads'),
        click.option('--scan-step', default=None, type=float, help='Grid step of the k-sweep'),
        click.option('--tol-accept', default=None, type=float, help='Largest sigma_min accepted as a root'),
        click.option('--promote-tol', default=None, type=float, help='Largest sigma_min refined as a candidate'),
        click.option('--merge-tol', default=None, type=float, help='Roots closer than this are merged'),
        click.option('--max-refine-iters', default=None, type=int, help='Golden-section iteration cap'),
    ]
    for option in reversed(options):
        func = option(func)
    return func


def load_run_config(config, debug, **overrides):
    log_level = logging.INFO if not debug else logging.DEBUG
    setup_platospec_logger(log_level)

    config = load_yaml_config(config) if config else None
    config = default_config(config_data=config, config_overwrite=set_config_ow(**overrides))
    return config, RootFindOpts.from_config(config)


def run_options(config, **given):
    """ Command-line values, each falling back to the 'run' config section when not given """
    run = config['run']
    return [run[key] if value is None else value for key, value in given.items()]


def run_window(config, window, kmin, kmax):
    """
    The window flags, or the ones of the 'run' config section when none of
    --window, --kmin and --kmax is given
    """
    if window is not None or kmin is not None or kmax is not None:
        return window, kmin, kmax
    run = config['run']
    windows = run['window']
    if windows and len(windows) > 1:
        raise click.UsageError(f'The run config holds {len(windows)} windows, this command takes one')
    return (windows[0] if windows else None), run['kmin'], run['kmax']


def resolve_window(opts, window, kmin, kmax):
    if window is not None:
        return max(window[0], opts.k_min), window[1]
    if kmax is None:
        raise click.UsageError('Give the window with --window lo:hi or --kmax')
    k_lo = opts.k_min if kmin is None else kmin
    if not 0 < k_lo < kmax:
        raise click.BadParameter(f'Invalid window ({k_lo}, {kmax})')
    return k_lo, kmax


def build_system(solid, graph_file, coupling, coupling_file):
    if bool(solid) == bool(graph_file):
        raise click.UsageError('Give exactly one of --solid or --graph-file')
    graph = build_platonic(Solid.parse(solid)) if solid else load_graph(graph_file)
    assignment = load_coupling_file(coupling_file) if coupling_file else CouplingAssignment(CouplingSpec.parse(coupling))
    logger.info(f'{graph!r} with coupling {assignment!r}')
    return SecularSystem(graph, assignment)


def spectrum_table(spectrum):
    rows = [[f'{ev.k:.12f}', ev.multiplicity, f'{ev.residual:.2e}', 'yes' if ev.cluster else '']
            for ev in spectrum]
    return tabulate(rows, headers=['k', 'Multiplicity', 'Residual', 'Cluster'])


def exit_if_unconverged(spectrum):
    if spectrum.unconverged:
        ks = ', '.join(f'{r.k:.8f}' for r in spectrum.unconverged)
        logger.error(f'Refinement did not converge below tol_accept at k = {ks}')
        sys.exit(EXIT_NOT_CONVERGED)


@click.group('platospec_cli')
@click.version_option(__version__)
def platospec_cli():
    pass


# /---------------------------------------------------------------------------/
#
# platospec spectrum

@platospec_cli.command('spectrum')
@click.option('--solid', '-s', default=None, help='Platonic solid: ' + ', '.join(s.value for s in Solid))
@click.option('--graph-file', '-g', default=None, type=click.Path(exists=True), help='Graph JSON file')
@click.option('--coupling', default=None, help='po, delta[:alpha], dirichlet, neumann or robin:c. Default po')
@click.option('--coupling-file', default=None, type=click.Path(exists=True), help='Per-vertex coupling JSON file')
@click.option('--kmin', default=None, type=float, help='Lower end of the window')
@click.option('--kmax', default=None, type=float, help='Upper end of the window')
@click.option('--window', default=None, callback=_window_callback, help='Window as lo:hi')
@click.option('--output', '-o', default=None, help='Write the spectrum to this file')
@click.option('--format', '-f', 'fmt', default=None, type=click.Choice(['json', 'csv']),
              help='Output format. Default from the file extension')
@click.option('--emit-plot-data', is_flag=True, help='Add the distance to the n pi lattice to the output')
@solver_options
@exit_on_error
def spectrum(solid, graph_file, coupling, coupling_file, kmin, kmax, window, output, fmt, emit_plot_data,
             config, debug, workers, scan_step, tol_accept, promote_tol, merge_tol, max_refine_iters):
    """ Eigenvalues of a coupled graph in a k-window """
    config, opts = load_run_config(config, debug, workers=workers, scan_step=scan_step, tol_accept=tol_accept,
                                   promote_tol=promote_tol, merge_tol=merge_tol, max_refine_iters=max_refine_iters)
    # graph and coupling flags fall back to the config as pairs
    if solid is None and graph_file is None:
        solid, graph_file = run_options(config, solid=None, graph_file=None)
    if coupling is None and coupling_file is None:
        coupling, coupling_file = run_options(config, coupling=None, coupling_file=None)
    output, fmt = run_options(config, output=output, format=fmt)
    system = build_system(solid, graph_file, coupling or 'po', coupling_file)
    k_lo, k_hi = resolve_window(opts, *run_window(config, window, kmin, kmax))

    with SweepExecutor(config=config) as executor:
        result = scan_spectrum(system, k_lo, k_hi, opts, executor)

    print()
    print(spectrum_table(result))
    print(f'\nTotal multiplicity: {result.total_multiplicity()}')

    if output:
        target = ClusterTarget.lattice(CenterFamily.N_PI) if emit_plot_data else None
        write_spectrum(result, output, fmt, target)

    exit_if_unconverged(result)


# /---------------------------------------------------------------------------/
#
# platospec verify

@platospec_cli.command('verify')
@click.option('--solid', '-s', default=None, help='Platonic solid: ' + ', '.join(s.value for s in Solid))
@click.option('--coupling', default=None, help='po (interval families, the default) or delta:alpha (Kirchhoff drift)')
@click.option('--window', 'windows', multiple=True, callback=_window_callback,
              help='Window as lo:hi. Repeat it to check several windows')
@click.option('--output', '-o', default=None, help='Write the JSON report to this file')
@click.option('--emit-plot-data', default=None, help='Write (k, dist, k dist) of each eigenvalue to this file')
@solver_options
@exit_on_error
def verify(solid, coupling, windows, output, emit_plot_data,
           config, debug, workers, scan_step, tol_accept, promote_tol, merge_tol, max_refine_iters):
    """ Checks the large-k behaviour of a Platonic solid's spectrum """
    config, opts = load_run_config(config, debug, workers=workers, scan_step=scan_step, tol_accept=tol_accept,
                                   promote_tol=promote_tol, merge_tol=merge_tol, max_refine_iters=max_refine_iters)
    solid, coupling, output = run_options(config, solid=solid, coupling=coupling, output=output)
    windows = windows or tuple(config['run']['window'] or ())
    if not solid:
        raise click.UsageError('Give the solid with --solid')
    solid = Solid.parse(solid)
    spec = CouplingSpec.parse(coupling or 'po')
    kind = OracleKind.parse(spec.kind)

    with SweepExecutor(config=config) as executor:
        if kind is OracleKind.PO:
            if not windows:
                raise click.UsageError('Give at least one --window lo:hi')
            for window in windows:
                if window[1] > window_cap(solid):
                    raise AsymptoticsError(f'Window {window} goes beyond k = {window_cap(solid)} for {solid.value}')
            reports, plot = [], []
            for window in windows:
                system = SecularSystem(build_platonic(solid), CouplingAssignment(spec))
                result = scan_spectrum(system, max(window[0], opts.k_min), window[1], opts, executor)
                report = check_theorem(solid, window, spectrum=result)
                reports.append(report)
                lattice = ClusterTarget.lattice(CenterFamily.N_PI)
                plot.extend([ev.k, lattice.distance(ev.k), ev.k * lattice.distance(ev.k)] for ev in result)

            rows = [[r.window, t.target, t.envelope, t.constant + t.slack, t.max_scaled_dist, t.count,
                     'pass' if t.passed else 'FAIL'] for r in reports for t in r.targets]
            print()
            print(tabulate(rows, headers=['Window', 'Target', 'Envelope', 'Bound', 'Max scaled dist',
                                          'Count', 'Result']))
            for r in reports:
                if r.unassigned or r.ambiguous:
                    print(f'\n{r.window}: unassigned {r.unassigned}, ambiguous {r.ambiguous}')
            document = {'reports': [r.to_dict() for r in reports]}
            passed = all(r.passed for r in reports)
            if emit_plot_data:
                write_table(plot, ['k', 'dist', 'scaled_dist'], emit_plot_data)
        else:
            drift_windows = windows if len(windows) >= 2 else DEFAULT_DRIFT_WINDOWS
            report = kirchhoff_drift(solid, spec.alpha, drift_windows, opts, executor)
            rows = [[w.window, w.max_scaled_drift, w.worst, len(w.pairs), len(w.unpaired)] for w in report.windows]
            print()
            print(tabulate(rows, headers=['Window', 'Max k|k_a - k_0|', 'Worst k', 'Pairs', 'Unpaired']))
            print(f'\nRatio of maxima: {report.ratio:.4f}')
            document = report.to_dict()
            passed = report.passed
            if emit_plot_data:
                plot = [[k, k0, abs(k - k0)] for w in report.windows for k, k0 in w.pairs]
                write_table(plot, ['k_alpha', 'k_0', 'drift'], emit_plot_data)

    document['pass'] = passed
    if output:
        write_report(document, output)
    print(f'\nResult: {"pass" if passed else "FAIL"}')
    if not passed:
        sys.exit(EXIT_FAILED_CHECK)


# /---------------------------------------------------------------------------/
#
# platospec compare

def pair_spectra(first, second, match_tol=0.1):
    """ Nearest pairing of the eigenvalues of `first` with those of `second` """
    ks = second.ks
    rows = []
    for ev in first:
        if len(ks) == 0:
            rows.append([ev.k, None, None, False])
            continue
        other = float(ks[abs(ks - ev.k).argmin()])
        diff = abs(ev.k - other)
        rows.append([ev.k, other, diff, diff <= match_tol])
    return rows


@platospec_cli.command('compare')
@click.argument('first')
@click.argument('second')
@click.option('--solid', '-s', default=None, help='Platonic solid: ' + ', '.join(s.value for s in Solid))
@click.option('--graph-file', '-g', default=None, type=click.Path(exists=True), help='Graph JSON file')
@click.option('--kmin', default=None, type=float, help='Lower end of the window')
@click.option('--kmax', default=None, type=float, help='Upper end of the window')
@click.option('--window', default=None, callback=_window_callback, help='Window as lo:hi')
@click.option('--output', '-o', default=None, help='Write the paired table to this file')
@click.option('--format', '-f', 'fmt', default=None, type=click.Choice(['json', 'csv']),
              help='Output format. Default from the file extension')
@solver_options
@exit_on_error
def compare(first, second, solid, graph_file, kmin, kmax, window, output, fmt,
            config, debug, workers, scan_step, tol_accept, promote_tol, merge_tol, max_refine_iters):
    """ Side-by-side spectra of the same graph under two couplings FIRST and SECOND """
    config, opts = load_run_config(config, debug, workers=workers, scan_step=scan_step, tol_accept=tol_accept,
                                   promote_tol=promote_tol, merge_tol=merge_tol, max_refine_iters=max_refine_iters)
    if solid is None and graph_file is None:
        solid, graph_file = run_options(config, solid=None, graph_file=None)
    output, fmt = run_options(config, output=output, format=fmt)
    k_lo, k_hi = resolve_window(opts, *run_window(config, window, kmin, kmax))
    systems = [build_system(solid, graph_file, coupling, None) for coupling in (first, second)]

    with SweepExecutor(config=config) as executor:
        spectra = [scan_spectrum(system, k_lo, k_hi, opts, executor) for system in systems]

    rows = pair_spectra(*spectra)
    headers = ['k1', 'k2', '|k1-k2|', 'matched']
    print()
    print(tabulate([[f'{a:.10f}', '' if b is None else f'{b:.10f}', '' if d is None else f'{d:.3e}',
                     'yes' if m else 'no'] for a, b, d, m in rows],
                   headers=[f'k1 ({first})', f'k2 ({second})', '|k1-k2|', 'Matched']))
    print(f'\nUnmatched within 0.1: {sum(1 for row in rows if not row[3])}')

    if output:
        write_table(rows, headers, output, fmt)


# /---------------------------------------------------------------------------/
#
# platospec oracles

@platospec_cli.command('oracles')
@click.option('--solid', '-s', default=None, help='Platonic solid: ' + ', '.join(s.value for s in Solid))
@click.option('--coupling', default=None, help='po or delta[:alpha]. Default po')
@click.option('--kmax', default=None, type=float, help='Upper end of the window. Default 4 pi')
@click.option('--method', '-m', default='auto', type=click.Choice(['auto', 'closed_form', 'component']),
              help='Sector secular functions or numeric component operators')
@click.option('--with-solver', is_flag=True, help='Also run the full-graph solver and pair both spectra')
@click.option('--output', '-o', default=None, help='Write the oracle spectrum to this file')
@click.option('--format', '-f', 'fmt', default=None, type=click.Choice(['json', 'csv']),
              help='Output format. Default from the file extension')
@solver_options
@exit_on_error
def oracles(solid, coupling, kmax, method, with_solver, output, fmt,
            config, debug, workers, scan_step, tol_accept, promote_tol, merge_tol, max_refine_iters):
    """ Spectrum from the union of the symmetry sectors """
    config, opts = load_run_config(config, debug, workers=workers, scan_step=scan_step, tol_accept=tol_accept,
                                   promote_tol=promote_tol, merge_tol=merge_tol, max_refine_iters=max_refine_iters)
    solid, coupling, kmax, output, fmt = run_options(config, solid=solid, coupling=coupling, kmax=kmax,
                                                     output=output, format=fmt)
    if not solid:
        raise click.UsageError('Give the solid with --solid')
    kmax = 4 * math.pi if kmax is None else kmax
    solid = Solid.parse(solid)
    spec = CouplingSpec.parse(coupling or 'po')
    kind = OracleKind.parse(spec.kind)

    with SweepExecutor(config=config) as executor:
        union = oracle_union_spectrum(solid, kind, spec.alpha, kmax, method=method, opts=opts, executor=executor)
        full = None
        if with_solver:
            system = SecularSystem(build_platonic(solid), CouplingAssignment(spec))
            full = scan_spectrum(system, opts.k_min, kmax, opts, executor)

    print()
    if full is None:
        print(spectrum_table(union))
    else:
        rows = pair_spectra(union, full)
        by_k = {ev.k: ev for ev in full}
        table = [[f'{a:.12f}', ev.multiplicity, '' if b is None else f'{b:.12f}',
                  '' if b is None else by_k[b].multiplicity, '' if d is None else f'{d:.2e}']
                 for (a, b, d, _), ev in zip(rows, union)]
        print(tabulate(table, headers=['Oracle k', 'Mult', 'Solver k', 'Mult', '|dk|']))
        print(f'\nTotal multiplicity: oracle {union.total_multiplicity()}, solver {full.total_multiplicity()}')

    if output:
        write_spectrum(union, output, fmt)


# /---------------------------------------------------------------------------/
#
# platospec export

@platospec_cli.command('export')
@click.argument('source', type=click.Path(exists=True))
@click.argument('destination')
@click.option('--format', '-f', 'fmt', default=None, type=click.Choice(['json', 'csv']),
              help='Output format. Default from the destination extension')
@click.option('--emit-plot-data', is_flag=True, help='Add the distance to a lattice of each eigenvalue')
@click.option('--lattice', default=CenterFamily.N_PI.value,
              type=click.Choice([f.value for f in CenterFamily if f is not CenterFamily.FIXED]),
              help='Lattice used by --emit-plot-data')
@click.option('--debug', '-d', is_flag=True, help='Debug mode')
@exit_on_error
def export(source, destination, fmt, emit_plot_data, lattice, debug):
    """ Converts a stored spectrum between CSV and JSON """
    log_level = logging.INFO if not debug else logging.DEBUG
    setup_platospec_logger(log_level)

    result = read_spectrum(source)
    target = ClusterTarget.lattice(CenterFamily(lattice)) if emit_plot_data else None
    used = write_spectrum(result, destination, fmt, target)
    logger.info(f'Converted {source} to {used}')


# /---------------------------------------------------------------------------/
#
# platospec test

@platospec_cli.command('test')
@click.option('--config', '-c', default=None, help='Path to yaml config file', type=click.Path(exists=True))
@click.option('--debug', '-d', is_flag=True, help='Debug mode')
@click.option('--test', '-t', default=None, help='Run a specific test. To avoid running similarly named tests '
                                                 'you may prefix the tester with its test class, '
                                                 'e.g. TestScan::test_dirichlet_edge. '
                                                 'Type "-t help" for the complete tests list')
@click.option('--exitfirst', '-x', is_flag=True, help='Stops test run upon first occurrence of a failed test')
def test(test, config, debug, exitfirst):
    import pytest

    dir_path = os.path.dirname(os.path.realpath(__file__))
    tests_path = os.path.abspath(os.path.join(dir_path, '..', 'tests'))

    if test == 'help':
        pytest.main([tests_path, "--collect-only"])
    else:
        cmd_string = [tests_path, "-v"]
        if exitfirst:
            cmd_string.extend(["-x"])
        if debug:
            cmd_string.extend(["-o", "log_cli=true", "--log-cli-level=DEBUG"])
        if config:
            cmd_string.extend(["--config", config])
        if test:
            cmd_string.extend(["-k", test])

        print("Executing platospec tests: pytest " + ' '.join(cmd_string[1:]))

        sys.exit(pytest.main(cmd_string))


if __name__ == '__main__':
    platospec_cli()
