import logging
import sys
from functools import wraps
from pathlib import Path
from typing import Dict, List, Optional, Tuple

import click
import numpy as np
from click.core import ParameterSource

from .config import CONFIG_DIR, DEFAULT_SEED, FAMILY_DIR, RESULTS_DIR, SEED_ENV_VAR, RunConfig
from .errors import ConfigParse, HypothesisViolated, SemiframeError, UnknownGalleryCase
from .frames import TruncationScan, VectorFamily, classify, frame_bounds
from .gallery import GALLERY, GalleryCase, build_case
from .genframe import build_genframe, lower_bound_certificate
from .hilbert import SpectralFn
from .reporting import Report, save_report, trajectory
from .transforms import classify_fn_transform, classify_transform, metric_transformability
from .verification.loaders.file_loader import ConfigFileLoader, FamilyFileLoader, coerce_value

logger = logging.getLogger(__name__)

DEFAULT_K_GRID = (0.0, 0.5, 1.0, 1.5)
DEFAULT_M_GRID = (0.0, 0.5, 1.0)
PERTURBATION = 1e-3

FN_LIBRARY: Dict[str, SpectralFn] = {
    "one": SpectralFn.power(0.0),
    "sqrt": SpectralFn.power(0.5),
    "t": SpectralFn.power(1.0),
    "sqrt_log": SpectralFn(lambda t: np.sqrt(t) * (1.0 + np.log1p(t)), "t^1/2(1+log(1+t))"),
    "log1p": SpectralFn(lambda t: np.log1p(t), "log(1+t)"),
}


class OrderedGroup(click.Group):
    def __init__(self, name=None, commands=None, **attrs):
        super(OrderedGroup, self).__init__(name, commands, **attrs)
        self.commands = commands or {}
        self.command_order = [
            'analyze',
            'transform',
            'verify',
            'gallery'
        ]

    def list_commands(self, ctx):
        return [name for name in self.command_order if name in self.commands]


def print_header(text: str):
    click.echo("\n" + "=" * 50)
    click.echo(f"  {text}")
    click.echo("=" * 50 + "\n")


def fail(message: str, code: int):
    click.echo(f"\nError: {message}", err=True)
    sys.exit(code)


def handle_errors(action: str):
    """
    Config errors exit 2, any other library error exits 1
    """
    def decorator(func):
        @wraps(func)
        def wrapper(*args, **kwargs):
            try:
                return func(*args, **kwargs)
            except (ConfigParse, UnknownGalleryCase) as e:
                fail(str(e), 2)
            except SemiframeError as e:
                logger.error(f"{action} failed: {str(e)}")
                fail(f"{action}: {str(e)}", 1)
        return wrapper
    return decorator


def case_options(func):
    options = [
        click.option('--gallery', 'case', default=None, help='Gallery case name (see `gallery list`)'),
        click.option('--family', default=None, type=click.Path(), help='Family file (JSON)'),
        click.option('--param', '-p', 'params', multiple=True, help='Gallery parameter KEY=VALUE'),
        click.option('--g', 'g', default=None, help='Symbol g of the exponential case'),
        click.option('--b', 'b', default=None, help='Density b of the exponential case'),
        click.option('--levels', default=None, type=int, help='Number of truncation levels'),
        click.option('--config', 'config_path', default=None, type=click.Path(), help='Run config file'),
        click.option('--seed', default=DEFAULT_SEED, type=int, envvar=SEED_ENV_VAR, show_default=True,
                     help='Probe seed'),
        click.option('--output-dir', default=RESULTS_DIR, show_default=True, help='Report directory'),
        click.option('--save/--no-save', default=True, help='Save the report to file'),
    ]
    for option in reversed(options):
        func = option(func)
    return func


def _from_flag(ctx: click.Context, name: str) -> bool:
    return ctx.get_parameter_source(name) not in (None, ParameterSource.DEFAULT)


def _parse_params(raw: Tuple[str, ...]) -> Dict:
    params = {}
    for item in raw:
        key, sep, value = item.partition('=')
        if not sep or not key.strip():
            raise ConfigParse(f"Expected KEY=VALUE, got '{item}'")
        params[key.strip()] = coerce_value(value)
    return params


def _parse_grid(raw: Optional[str], name: str) -> Tuple[float, ...]:
    if not raw:
        return ()
    try:
        return tuple(float(v) for v in raw.split(',') if v.strip())
    except ValueError:
        raise ConfigParse(f"--{name} expects comma-separated numbers, got '{raw}'")


def locate(path: str, directory: str) -> str:
    """
    `path` as given if it exists, otherwise looked up under `directory`
    """
    if Path(path).exists():
        return path
    candidate = Path(directory) / path
    return str(candidate) if candidate.exists() else path


def resolve_config(ctx: click.Context, config_path: Optional[str], **flags) -> RunConfig:
    """
    Flags override the config file, which overrides the defaults
    """
    config = ConfigFileLoader(locate(config_path, CONFIG_DIR)).load() if config_path else RunConfig()

    params = dict(config.params)
    params.update(_parse_params(flags.pop('params', ())))
    for shortcut in ('g', 'b'):
        value = flags.pop(shortcut, None)
        if value is not None:
            params[shortcut] = coerce_value(value)
    config.params = params

    for name, value in flags.items():
        if _from_flag(ctx, name) or (config_path is None and value is not None):
            setattr(config, name, value)
    return config


def load_subject(config: RunConfig) -> Tuple[VectorFamily, Optional[TruncationScan], Optional[GalleryCase]]:
    if config.case and config.family:
        raise ConfigParse("Give either a gallery case or a family file, not both")
    if config.family:
        if config.params:
            raise ConfigParse("Gallery parameters need a gallery case")
        return FamilyFileLoader(locate(config.family, FAMILY_DIR)).load(), None, None
    if config.case:
        case = build_case(config.case, config.params, config.levels)
        return case.family, case.scan, case
    raise ConfigParse("Provide --gallery NAME or --family PATH (or a config file with one of them)")


def _finish(report: Report, config: RunConfig, save: bool) -> None:
    if save:
        for path in save_report(report, config.output_dir):
            click.echo(f"Saved {path}")
    if not report.passed:
        sys.exit(1)


@click.group(cls=OrderedGroup)
def cli():
    """
    Semiframe: a numerical lab for continuous frames and semi-frames
    """
    pass


@cli.command()
@case_options
@click.option('--certify', default=None, type=float, help='Lower bound m for the five-way certificate')
@click.pass_context
@handle_errors("Analysis")
def analyze(ctx, case, family, params, g, b, levels, config_path, seed, output_dir, save, certify):
    """
    Classify a family and measure its bounds
    """
    config = resolve_config(ctx, config_path, case=case, family=family, params=params, g=g, b=b,
                            levels=levels, seed=seed, output_dir=output_dir)
    subject, scan, gallery_case = load_subject(config)
    print_header(f"Analyzing {gallery_case.name if gallery_case else config.family}")

    result = classify(subject, scan)
    levels_ = scan.levels if scan is not None else (subject,)
    refinements = scan.refinements if scan is not None else (float(subject.size),)
    bounds = [frame_bounds(level) for level in levels_]

    gf = build_genframe(subject)
    m = certify if certify is not None else gf.restricted.lambda_min
    certificate = lower_bound_certificate(subject, m, gf, config.seed)

    results = {
        "verdict": result.verdict,
        "evidence": result.evidence,
        "bounds": bounds[-1].as_dict(),
        "certificate": certificate.as_dict(),
    }
    passed = certificate.consistent
    if gallery_case is not None:
        results["case"] = gallery_case.summary()
        results["case_evidence"] = gallery_case.evidence
        results["agrees"] = result.verdict == gallery_case.predicted
        passed = passed and results["agrees"]

    click.echo(f"Verdict: {result.verdict.value}")
    click.echo(f"Bounds at the finest level: ({bounds[-1].lower:.6g}, {bounds[-1].upper:.6g})")
    if gallery_case is not None:
        click.echo(f"Predicted: {gallery_case.predicted.value} ({'agrees' if results['agrees'] else 'DISAGREES'})")
    click.echo(f"Lower bound {m:.6g}: {'holds' if certificate.holds else 'fails'}"
               f"{'' if certificate.consistent else ' (certificates disagree)'}")

    report = Report("analyze", config.echo(), config.seed, results, trajectory(refinements, bounds), passed=passed)
    _finish(report, config, save)


def _fn(name: str) -> SpectralFn:
    if name not in FN_LIBRARY:
        raise ConfigParse(f"Unknown spectral function '{name}', expected one of {sorted(FN_LIBRARY)}")
    return FN_LIBRARY[name]


def _parse_fn_pairs(raw: Tuple[str, ...]) -> Tuple[Tuple[str, str], ...]:
    pairs = []
    for item in raw:
        g, sep, h = item.partition(':')
        if not sep or not g or not h:
            raise ConfigParse(f"--fn expects g:h, got '{item}'")
        pairs.append((g.strip(), h.strip()))
    return tuple(pairs)


def _agreement_row(kind: str, k, m, g: str, h: str, verdict=None, error: Optional[str] = None) -> Dict:
    return {
        "kind": kind,
        "k": k,
        "m": m,
        "g": g,
        "h": h,
        "measured": verdict.verdict.value if verdict else "HypothesisViolated",
        "predicted": verdict.predicted_verdict.value if verdict else "HypothesisViolated",
        "agrees": verdict.agrees if verdict else True,
        "note": error or "",
    }


@cli.command()
@case_options
@click.option('--k-grid', default=None, help='Comma-separated k values')
@click.option('--m-grid', default=None, help='Comma-separated m values')
@click.option('--fn', 'fn_pairs', multiple=True, help=f'Function pair g:h from {sorted(FN_LIBRARY)}')
@click.option('--metric', is_flag=True, help='Decide metric transformability')
@click.pass_context
@handle_errors("Transform")
def transform(ctx, case, family, params, g, b, levels, config_path, seed, output_dir, save,
              k_grid, m_grid, fn_pairs, metric):
    """
    Sweep transforms T^-k phi in H(T^m) and decide metric transformability
    """
    config = resolve_config(ctx, config_path, case=case, family=family, params=params, g=g, b=b,
                            levels=levels, seed=seed, output_dir=output_dir,
                            k_grid=_parse_grid(k_grid, "k-grid") or None,
                            m_grid=_parse_grid(m_grid, "m-grid") or None,
                            fn_pairs=_parse_fn_pairs(fn_pairs) or None)
    if not (config.k_grid or config.m_grid or config.fn_pairs or metric):
        config.k_grid, config.m_grid = DEFAULT_K_GRID, DEFAULT_M_GRID
    elif config.k_grid or config.m_grid:
        config.k_grid = config.k_grid or DEFAULT_K_GRID
        config.m_grid = config.m_grid or DEFAULT_M_GRID

    subject, scan, gallery_case = load_subject(config)
    print_header(f"Transforms of {gallery_case.name if gallery_case else config.family}")
    gf = build_genframe(subject)

    points = [(k, m) for m in config.m_grid for k in config.k_grid if k >= m]
    rows: List[Dict] = []
    total = len(points) + len(config.fn_pairs)
    with click.progressbar(length=max(total, 1), label='Classifying transforms') as bar:
        for k, m in points:
            try:
                rows.append(_agreement_row("power", k, m, f"t^{k:g}", f"t^{m:g}",
                                           classify_transform(subject, gf, k, m, scan)))
            except HypothesisViolated as e:
                rows.append(_agreement_row("power", k, m, f"t^{k:g}", f"t^{m:g}", error=str(e)))
            bar.update(1)
        for g_name, h_name in config.fn_pairs:
            g_fn, h_fn = _fn(g_name), _fn(h_name)
            try:
                rows.append(_agreement_row("fn", "", "", g_name, h_name,
                                           classify_fn_transform(subject, gf, g_fn, h_fn, scan)))
            except HypothesisViolated as e:
                rows.append(_agreement_row("fn", "", "", g_name, h_name, error=str(e)))
            bar.update(1)

    results: Dict = {}
    passed = all(row["agrees"] for row in rows)
    if rows:
        agreeing = sum(row["agrees"] for row in rows)
        results["agreement_rate"] = agreeing / len(rows)
        click.echo(f"\nAgreement: {agreeing}/{len(rows)}")
        for row in rows:
            label = f"k={row['k']:g}, m={row['m']:g}" if row["kind"] == "power" else f"g={row['g']}, h={row['h']}"
            click.echo(f"  {label}: {row['measured']} (predicted {row['predicted']})")

    if metric:
        decision = metric_transformability(subject, scan)
        results["metric"] = decision.as_dict()
        click.echo(f"\nMetric transformability: clause ({decision.clause})")
        click.echo(f"  {decision.message}")
        if decision.verified is False:
            click.echo(f"  Constructed G phi misses Parseval by {decision.residuals['parseval']:.3e}")
            passed = False
        if gallery_case is not None and gallery_case.predicted_clause is not None:
            results["metric"]["predicted_clause"] = gallery_case.predicted_clause
            passed = passed and decision.clause == gallery_case.predicted_clause

    report = Report("transform", config.echo(), config.seed, results, agreement=rows, passed=passed)
    _finish(report, config, save)


@cli.command()
@click.option('--module', 'modules', multiple=True, help='Suite to run (repeatable), or `all`; default all')
@click.option('--dim', default=6, show_default=True, type=int, help='Ambient dimension of random inputs')
@click.option('--perturb', is_flag=True, help=f'Add {PERTURBATION:g} to one matrix entry per suite')
@click.option('--seed', default=DEFAULT_SEED, type=int, envvar=SEED_ENV_VAR, show_default=True, help='Probe seed')
@click.option('--output-dir', default=RESULTS_DIR, show_default=True, help='Report directory')
@click.option('--save/--no-save', default=True, help='Save the report to file')
@handle_errors("Verification")
def verify(modules, dim, perturb, seed, output_dir, save):
    """
    Run the invariant suites
    """
    from .verification import SUITES, ResidualEvaluator, VerificationRunner

    if 'all' in modules:
        modules = ()
    unknown = [name for name in modules if name not in SUITES]
    if unknown:
        raise ConfigParse(f"Unknown module(s) {unknown}, expected some of {sorted(SUITES)}")
    if dim < 2:
        raise ConfigParse("--dim must be at least 2")

    print_header("Verifying invariants")
    selected = list(modules) or list(SUITES)
    perturbation = PERTURBATION if perturb else 0.0
    suites = [SUITES[name](dim=dim, seed=seed, perturbation=perturbation) for name in selected]
    config = {"modules": selected, "dim": dim, "perturbation": perturbation, "seed": seed}

    with click.progressbar(length=100, label='Running suites') as bar:
        def progress_callback(percent):
            bar.update(percent - bar.pos)

        runner = VerificationRunner(suites, ResidualEvaluator(), config)
        report = runner.run(save_results=save, output_dir=output_dir, progress_callback=progress_callback)

    click.echo("")
    for name, summary in report.results.items():
        click.echo(f"{name}: {'PASS' if summary['passed'] else 'FAIL'}")
        for check in summary["checks"]:
            if not check["passed"]:
                click.echo(f"  failed: {check['name']} (residual {check['residual']:.3e}, tolerance {check['tolerance']:.1e})")
    for path in runner.last_written:
        click.echo(f"Saved {path}")
    if not report.passed:
        sys.exit(1)


@cli.group()
def gallery():
    """
    Browse the shipped example families
    """
    pass


@gallery.command('list')
def gallery_list():
    """
    List gallery cases
    """
    print_header("Gallery")
    for name, entry in GALLERY.items():
        click.echo(f"{name:<16} {entry.description}")


@gallery.command('show')
@click.argument('name')
@handle_errors("Gallery")
def gallery_show(name):
    """
    Show the defaults and predictions of a gallery case
    """
    case = build_case(name)
    entry = GALLERY[name]
    print_header(f"Gallery case: {name}")
    click.echo(entry.description)
    click.echo(f"Defaults: {', '.join(f'{k}={v}' for k, v in entry.defaults.items())}")
    summary = case.summary()
    click.echo(f"Refinements: {', '.join(f'{r:g}' for r in summary['refinements'])}")
    click.echo(f"Predicted verdict: {summary['predicted']}")
    click.echo(f"Predicted operator: {summary['predicted_operator']}")
    if summary["predicted_clause"]:
        click.echo(f"Predicted metric clause: ({summary['predicted_clause']})")
    if summary["note"]:
        click.echo(f"Note: {summary['note']}")


def main():
    cli()


if __name__ == '__main__':
    main()
