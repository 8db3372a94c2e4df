"""
MultiNet - Command-Line Interface
Generate, embed, cluster and plot mixture multilayer networks.

Every command that writes files also writes a run manifest next to its outputs;
``multinet rerun <manifest>`` replays it.
"""

import functools
import logging
import sys
import time
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

import click
import numpy as np
from rich.console import Console
from rich.markup import escape
from rich.panel import Panel
from rich.table import Table

from src import __version__
from src.baselines import EmbeddingType, spec_embedding
from src.cluster import (
    community_cluster_dbscan,
    community_cluster_km,
    get_cluster_report,
    misclustering_rate,
)
from src.data_loader import (
    LAYER_LABEL_SUFFIX,
    NODE_LABEL_SUFFIX,
    TensorLoader,
    dataset_descriptors,
    read_cluster_csv,
    read_embedding_csv,
    read_labels,
    read_tns,
    sidecar_path,
    write_cluster_csv,
    write_embedding_csv,
    write_labels,
    write_tns,
)
from src.embed_lsm import GdConfig, initialization_lsm, projected_gd
from src.embed_twist import IterationType, TwistConfig, default_ranks, power_iteration
from src.errors import ArgumentError, MultiNetError
from src.generate import (
    GenList,
    GroundTruth,
    MmlsmParams,
    MmsbmParams,
    generate_mmlsm,
    generate_mmsbm,
)
from src.manifest import MANIFEST_SUFFIX, RunManifest, load_manifest, manifest_path
from src.plotting import embedding_network
from src.settings import (
    DEFAULT_CMAX,
    DEFAULT_DELTA,
    DEFAULT_EPS,
    DEFAULT_ETA,
    DEFAULT_MAX_ITER,
    DEFAULT_MIN_PTS,
    DEFAULT_PERTURB,
    DEFAULT_SAMPLE_SIZE,
    DEFAULT_SCALE_PAR,
    DEFAULT_SGMA,
    DEFAULT_TMAX,
    DEFAULT_TOL,
    DEFAULT_U_MEAN,
)

# Configure logging
logging.basicConfig(
    level=logging.INFO,
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
)
logger = logging.getLogger(__name__)

console = Console()
err_console = Console(stderr=True)

TRUTH_U_SUFFIX = '.U.csv'
TRUTH_W_SUFFIX = '.W.csv'
CORE_SUFFIX = '.core.tns'
NODES_CSV_SUFFIX = '.nodes.csv'
LAYERS_CSV_SUFFIX = '.layers.csv'
LOSS_CSV_SUFFIX = '.loss.csv'


def handle_errors(func):
    """Print library errors and exit with their code."""
    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except MultiNetError as e:
            err_console.print(f"[red]Error: {escape(str(e))}[/red]", soft_wrap=True)
            logger.debug("Command failed", exc_info=True)
            sys.exit(e.exit_code)
    return wrapper


def _resolve_seed(ctx: click.Context, seed: Optional[int]) -> int:
    """Draw a seed when none was given and record it so the run can be replayed."""
    if seed is None:
        seed = int(np.random.SeedSequence().entropy)
        logger.info(f"No seed given, using {seed}")
    ctx.params['seed'] = seed
    return seed


def _argv_value(value: Any) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _replay_argv(ctx: click.Context) -> List[str]:
    """Canonical argv that re-invokes this command with its resolved parameters."""
    names = []
    node = ctx
    while node.parent is not None:
        names.append(node.info_name)
        node = node.parent
    argv = list(reversed(names))

    for param in ctx.command.params:
        value = ctx.params.get(param.name)
        if value is None:
            continue
        if isinstance(param, click.Argument):
            argv.append(_argv_value(value))
        elif param.is_flag:
            if param.secondary_opts:
                argv.append(param.opts[0] if value else param.secondary_opts[0])
            elif value:
                argv.append(param.opts[0])
        else:
            argv.extend([param.opts[0], _argv_value(value)])
    return argv


def _record_run(ctx: click.Context, target: Path, started: float,
                inputs: Sequence[Path], outputs: Sequence[Path]) -> Path:
    params = {k: (str(v) if isinstance(v, Path) else v) for k, v in ctx.params.items()}
    manifest = RunManifest(
        subcommand=ctx.command_path.split(' ', 1)[-1],
        params=params,
        argv=_replay_argv(ctx),
        seed=params.get('seed'),
        inputs=[str(p) for p in inputs],
        outputs=[str(p) for p in outputs],
        wall_clock_seconds=round(time.perf_counter() - started, 6),
    )
    return manifest.write(target)


def _prefixed(prefix: str, suffix: str) -> Path:
    return Path(f"{prefix}{suffix}")


def _report_outputs(outputs: Sequence[Path], manifest: Path) -> None:
    for path in outputs:
        console.print(f"[green]Wrote {escape(str(path))}[/green]", soft_wrap=True)
    console.print(f"[dim]Manifest: {escape(str(manifest))}[/dim]", soft_wrap=True)


def _parse_ranks(value: Optional[str], m: Optional[int], K: Optional[int]) -> Tuple[int, int, int]:
    if value is None:
        if m is None or K is None:
            raise ArgumentError("Provide --ranks r1,r2,r3 or both --m and --K")
        return default_ranks(m, K)
    try:
        ranks = tuple(int(part) for part in value.split(','))
    except ValueError:
        raise ArgumentError(f"--ranks must be comma-separated integers, got '{value}'")
    if len(ranks) != 3:
        raise ArgumentError(f"--ranks needs exactly three values, got '{value}'")
    return ranks


def _load_tensor(path: str, dataset: Optional[str],
                 binarize_threshold: Optional[float]) -> Tuple[np.ndarray, Dict[str, Any]]:
    loader = TensorLoader(binarize_threshold=binarize_threshold)
    return loader.load_file(path, dataset=dataset)


def _read_any_labels(path: str, column: int = 0) -> np.ndarray:
    if Path(path).suffix.lower() == '.csv':
        return read_cluster_csv(path)
    return read_labels(path, column=column)


@click.group()
@click.version_option(version=__version__, prog_name='multinet')
@click.option('--verbose', '-v', is_flag=True, help='Debug logging')
def cli(verbose):
    """
    MultiNet

    Generate mixture multilayer networks, embed their nodes and layers,
    cluster the embeddings and plot the results.
    """
    if verbose:
        logging.getLogger().setLevel(logging.DEBUG)


# --------------------------------------------------------------------------- generate

@cli.group()
def generate():
    """Sample synthetic multilayer networks."""


@generate.command('mmsbm')
@click.option('--n', type=int, required=True, help='Number of nodes')
@click.option('--m', type=int, required=True, help='Number of network types')
@click.option('--L', 'n_layers', type=int, required=True, help='Number of layers')
@click.option('--K', 'n_communities', type=int, required=True, help='Communities per network type')
@click.option('--d', type=float, help='Average degree (default n/4)')
@click.option('--r', type=float, help='Out-in probability ratio (default 0.4)')
@click.option('--seed', type=int, help='Root RNG seed')
@click.option('--shared-memberships', is_flag=True,
              help='Use one community assignment for every network type')
@click.option('--output', '-o', type=click.Path(dir_okay=False), required=True,
              help='Output TNS3 file')
@click.pass_context
@handle_errors
def generate_mmsbm_cmd(ctx, n, m, n_layers, n_communities, d, r, seed, shared_memberships, output):
    """
    Mixture multilayer stochastic block model.

    Writes the tensor, <name>.layers.txt (network type per layer) and
    <name>.nodes.txt (one row per node, one community per network type).

    Example:

        multinet generate mmsbm --n 300 --m 2 --L 40 --K 3 --seed 7 -o net.tns
    """
    started = time.perf_counter()
    seed = _resolve_seed(ctx, seed)
    params = MmsbmParams(n=n, m=m, L=n_layers, K=n_communities, d=d, r=r, seed=seed,
                         shared_memberships=shared_memberships)
    gen = generate_mmsbm(params)

    outputs = [
        write_tns(gen.tensor, output),
        write_labels(gen.truth.layer_types, sidecar_path(output, LAYER_LABEL_SUFFIX)),
        write_labels(gen.truth.memberships.T, sidecar_path(output, NODE_LABEL_SUFFIX)),
    ]
    manifest = _record_run(ctx, manifest_path(output), started, [], outputs)
    console.print(
        f"MMSBM tensor {gen.tensor.shape}: p_in={gen.metadata['p_in']:.6f}, "
        f"p_out={gen.metadata['p_out']:.6f}", soft_wrap=True
    )
    _report_outputs(outputs, manifest)


@generate.command('mmlsm')
@click.option('--n', type=int, required=True, help='Number of nodes')
@click.option('--m', type=int, required=True, help='Number of network types')
@click.option('--L', 'n_layers', type=int, required=True, help='Number of layers')
@click.option('--rank', type=int, required=True, help='Latent dimension')
@click.option('--u-mean', type=float, default=DEFAULT_U_MEAN, show_default=True,
              help='Mean of the latent positions')
@click.option('--cmax', type=float, default=DEFAULT_CMAX, show_default=True,
              help='Bound on core entries')
@click.option('--int-type', type=click.Choice(['Uniform', 'Norm'], case_sensitive=False),
              default='Uniform', show_default=True, help='Core entry distribution')
@click.option('--kernel', type=click.Choice(['logit', 'probit'], case_sensitive=False),
              default='logit', show_default=True, help='Link function')
@click.option('--scale-par', type=float, default=DEFAULT_SCALE_PAR, show_default=True,
              help='Divisor applied to theta')
@click.option('--d', type=float, help='Target average degree')
@click.option('--seed', type=int, help='Root RNG seed')
@click.option('--output', '-o', type=click.Path(dir_okay=False), required=True,
              help='Output TNS3 file')
@click.pass_context
@handle_errors
def generate_mmlsm_cmd(ctx, n, m, n_layers, rank, u_mean, cmax, int_type, kernel, scale_par,
                       d, seed, output):
    """
    Mixture multilayer latent space model.

    Besides the tensor and <name>.layers.txt, the latent truth is written as
    <name>.U.csv, <name>.W.csv and <name>.core.tns for warm-started fits.
    """
    started = time.perf_counter()
    seed = _resolve_seed(ctx, seed)
    params = MmlsmParams(n=n, m=m, L=n_layers, rank=rank, u_mean=u_mean, cmax=cmax, d=d,
                         int_type=int_type, kernel_fun=kernel.lower(), scale_par=scale_par,
                         seed=seed)
    gen = generate_mmlsm(params)

    truth = gen.truth
    outputs = [
        write_tns(gen.tensor, output),
        write_labels(truth.layer_types, sidecar_path(output, LAYER_LABEL_SUFFIX)),
        write_embedding_csv(truth.U, sidecar_path(output, TRUTH_U_SUFFIX)),
        write_embedding_csv(truth.W, sidecar_path(output, TRUTH_W_SUFFIX)),
        write_tns(truth.C, sidecar_path(output, CORE_SUFFIX)),
    ]
    manifest = _record_run(ctx, manifest_path(output), started, [], outputs)
    console.print(
        f"MMLSM tensor {gen.tensor.shape}: density="
        f"{gen.tensor.sum() / (n * (n - 1) * n_layers):.6f}", soft_wrap=True
    )
    _report_outputs(outputs, manifest)


# --------------------------------------------------------------------------- embed

def tensor_input_options(func):
    """Options shared by every embedding command."""
    func = click.option('--output', '-o', 'prefix', required=True,
                        help='Output prefix for <prefix>.nodes.csv, <prefix>.layers.csv, ...')(func)
    func = click.option('--binarize', 'binarize_threshold', type=float,
                        help='Set entries above this threshold to 1 and the rest to 0')(func)
    func = click.option('--dataset', help='Check dims against a known dataset')(func)
    func = click.argument('tensor_file', type=click.Path(dir_okay=False))(func)
    return func


@cli.group()
def embed():
    """Embed the nodes and layers of a multilayer network."""


def _run_power_iteration(ctx, iteration_type: IterationType, tensor_file, dataset,
                         binarize_threshold, prefix, ranks, m, K, delta1, delta2, max_iter, tol):
    started = time.perf_counter()
    tensor, _ = _load_tensor(tensor_file, dataset, binarize_threshold)
    cfg = TwistConfig(ranks=_parse_ranks(ranks, m, K), type=iteration_type, delta1=delta1,
                      delta2=delta2, max_iter=max_iter, tol=tol)
    result = power_iteration(tensor, cfg)

    outputs = [
        write_embedding_csv(result.node_embedding, _prefixed(prefix, NODES_CSV_SUFFIX)),
        write_embedding_csv(result.layer_embedding, _prefixed(prefix, LAYERS_CSV_SUFFIX)),
        write_tns(result.Z, _prefixed(prefix, CORE_SUFFIX)),
    ]
    manifest = _record_run(ctx, _prefixed(prefix, MANIFEST_SUFFIX), started, [tensor_file], outputs)
    status = 'converged' if result.converged else 'stopped at max-iter'
    console.print(f"{iteration_type.value}: {status} after {result.iterations} sweeps, "
                  f"ranks={cfg.ranks}", soft_wrap=True)
    _report_outputs(outputs, manifest)


def power_iteration_options(func):
    func = click.option('--tol', type=float, default=DEFAULT_TOL, show_default=True,
                        help='Projector change that counts as converged')(func)
    func = click.option('--max-iter', type=int, default=DEFAULT_MAX_ITER, show_default=True,
                        help='Maximum number of sweeps')(func)
    func = click.option('--K', 'n_communities', type=int,
                        help='Communities per type (derives ranks with --m)')(func)
    func = click.option('--m', type=int, help='Number of network types (derives ranks with --K)')(func)
    func = click.option('--ranks', help='Core ranks as r1,r2,r3')(func)
    return func


@embed.command('twist')
@tensor_input_options
@power_iteration_options
@click.option('--delta1', type=float, default=DEFAULT_DELTA, show_default=True,
              help='Row norm bound for mode 1')
@click.option('--delta2', type=float, default=DEFAULT_DELTA, show_default=True,
              help='Row norm bound for mode 2')
@click.pass_context
@handle_errors
def embed_twist_cmd(ctx, tensor_file, dataset, binarize_threshold, prefix, ranks, m,
                    n_communities, max_iter, tol, delta1, delta2):
    """
    Regularized power iteration (TWIST).

    Example:

        multinet embed twist net.tns --m 2 --K 3 -o results/net
    """
    _run_power_iteration(ctx, IterationType.TWIST, tensor_file, dataset, binarize_threshold,
                         prefix, ranks, m, n_communities, delta1, delta2, max_iter, tol)


@embed.command('tucker')
@tensor_input_options
@power_iteration_options
@click.pass_context
@handle_errors
def embed_tucker_cmd(ctx, tensor_file, dataset, binarize_threshold, prefix, ranks, m,
                     n_communities, max_iter, tol):
    """Unregularized power iteration (Tucker / HOOI)."""
    _run_power_iteration(ctx, IterationType.TUCKER, tensor_file, dataset, binarize_threshold,
                         prefix, ranks, m, n_communities, DEFAULT_DELTA, DEFAULT_DELTA,
                         max_iter, tol)


def _run_spectral(ctx, embedding_type: EmbeddingType, tensor_file, dataset,
                  binarize_threshold, prefix, rank, requested_type: Optional[str] = None):
    if requested_type is not None and EmbeddingType.parse(requested_type) is not embedding_type:
        raise ArgumentError(
            f"--embedding-type {requested_type} contradicts {ctx.info_name}, which gives a "
            f"{embedding_type.value.lower()} embedding"
        )
    started = time.perf_counter()
    tensor, _ = _load_tensor(tensor_file, dataset, binarize_threshold)
    embedding = spec_embedding(tensor, rank, embedding_type)

    suffix = NODES_CSV_SUFFIX if embedding_type is EmbeddingType.NODE else LAYERS_CSV_SUFFIX
    outputs = [write_embedding_csv(embedding, _prefixed(prefix, suffix))]
    manifest = _record_run(ctx, _prefixed(prefix, MANIFEST_SUFFIX), started, [tensor_file], outputs)
    _report_outputs(outputs, manifest)


# Optional on the baselines; must agree with the type the subcommand computes
spectral_type_option = click.option(
    '--embedding-type', type=click.Choice(['node', 'layer'], case_sensitive=False),
    help='Must match the subcommand: node for sum-adj, layer for m3-sc')


@embed.command('sum-adj')
@tensor_input_options
@click.option('--rank', type=int, required=True, help='Number of eigenvectors')
@spectral_type_option
@click.pass_context
@handle_errors
def embed_sum_adj_cmd(ctx, tensor_file, dataset, binarize_threshold, prefix, rank, embedding_type):
    """Node embedding from the eigenvectors of the summed adjacency matrix."""
    _run_spectral(ctx, EmbeddingType.NODE, tensor_file, dataset, binarize_threshold, prefix, rank,
                  embedding_type)


@embed.command('m3-sc')
@tensor_input_options
@click.option('--rank', type=int, required=True, help='Number of singular vectors')
@spectral_type_option
@click.pass_context
@handle_errors
def embed_m3_sc_cmd(ctx, tensor_file, dataset, binarize_threshold, prefix, rank, embedding_type):
    """Layer embedding from the mode-3 unfolding."""
    _run_spectral(ctx, EmbeddingType.LAYER, tensor_file, dataset, binarize_threshold, prefix, rank,
                  embedding_type)


def _load_latent_truth(truth_prefix: str, tensor: np.ndarray) -> GenList:
    U = read_embedding_csv(sidecar_path(truth_prefix, TRUTH_U_SUFFIX))
    W = read_embedding_csv(sidecar_path(truth_prefix, TRUTH_W_SUFFIX))
    C, _ = read_tns(sidecar_path(truth_prefix, CORE_SUFFIX))
    truth = GroundTruth(layer_types=np.argmax(W, axis=1), U=U, W=W, C=C)
    return GenList(tensor=tensor, theta=np.zeros_like(tensor), truth=truth)


@embed.command('lsm')
@tensor_input_options
@click.option('--rank', type=int, required=True, help='Latent dimension (columns of U)')
@click.option('--M', 'n_types', type=int, required=True, help='Number of network types (columns of W)')
@click.option('--init', 'init_type', type=click.Choice(['spec', 'rand', 'warm']), default='spec',
              show_default=True, help='Initialization')
@click.option('--perturb', type=float, default=DEFAULT_PERTURB, show_default=True,
              help='Uniform noise bound for rand/warm initialization')
@click.option('--truth-prefix', help='Prefix of <name>.U.csv/.W.csv/.core.tns for --init warm')
@click.option('--cmax', type=float, help='Clip bound for core entries (default from initialization)')
@click.option('--eta', type=float, default=DEFAULT_ETA, show_default=True, help='Step size')
@click.option('--tmax', type=int, default=DEFAULT_TMAX, show_default=True, help='Iterations')
@click.option('--link', type=click.Choice(['logit', 'probit', 'poisson']), default='logit',
              show_default=True, help='Link function')
@click.option('--rd', type=click.Choice(['rand', 'non'], case_sensitive=False), default='non',
              show_default=True, help='Stochastic (rand) or full (non) gradients')
@click.option('--sgma', type=float, default=DEFAULT_SGMA, show_default=True, help='Link scale')
@click.option('--sample-size', type=int, default=DEFAULT_SAMPLE_SIZE, show_default=True,
              help='Entries sampled per stochastic gradient')
@click.option('--seed', type=int, help='RNG seed for initialization and sampling')
@click.option('--show/--no-show', default=True, show_default=True, help='Log the loss every iteration')
@click.pass_context
@handle_errors
def embed_lsm_cmd(ctx, tensor_file, dataset, binarize_threshold, prefix, rank, n_types, init_type,
                  perturb, truth_prefix, cmax, eta, tmax, link, rd, sgma, sample_size, seed, show):
    """
    Latent space model fit by projected gradient descent.

    Writes U as <prefix>.nodes.csv, W as <prefix>.layers.csv, the core as
    <prefix>.core.tns and the loss trace as <prefix>.loss.csv.
    """
    started = time.perf_counter()
    seed = _resolve_seed(ctx, seed)
    tensor, _ = _load_tensor(tensor_file, dataset, binarize_threshold)
    inputs = [tensor_file]

    source: Any = tensor
    if init_type == 'warm':
        if truth_prefix is None:
            raise ArgumentError("--init warm needs --truth-prefix")
        source = _load_latent_truth(truth_prefix, tensor)
        inputs.append(truth_prefix)

    init = initialization_lsm(source, n=tensor.shape[0], rank=rank, M=n_types, perturb=perturb,
                              int_type=init_type, seed=seed)
    cfg = GdConfig(Cmax=cmax, eta_outer=eta, tmax_outer=tmax, p_type=link, rd=rd, show=show,
                   sgma=sgma, sample_size=sample_size, seed=seed)
    result = projected_gd(init, cfg)

    loss = np.asarray(result.loss_trace)[:, None]
    outputs = [
        write_embedding_csv(result.U, _prefixed(prefix, NODES_CSV_SUFFIX)),
        write_embedding_csv(result.W, _prefixed(prefix, LAYERS_CSV_SUFFIX)),
        write_tns(result.C, _prefixed(prefix, CORE_SUFFIX)),
        write_embedding_csv(loss, _prefixed(prefix, LOSS_CSV_SUFFIX)),
    ]
    manifest = _record_run(ctx, _prefixed(prefix, MANIFEST_SUFFIX), started, inputs, outputs)
    console.print(f"LSM: loss {result.loss_trace[0]:.6f} -> {result.loss_trace[-1]:.6f} "
                  f"over {result.iterations} iterations", soft_wrap=True)
    _report_outputs(outputs, manifest)


# --------------------------------------------------------------------------- cluster

def item_type_option(func):
    return click.option('--type', 'item_type', type=click.Choice(['n', 'N']), default='n',
                        show_default=True, help="Rows are nodes (n) or networks (N)")(func)


@cli.group()
def cluster():
    """Cluster embedding rows and score clusterings."""


@cluster.command('kmeans')
@click.argument('embedding_file', type=click.Path(dir_okay=False))
@click.option('--k', type=int, required=True, help='Number of clusters')
@click.option('--seed', type=int, help='Root seed for the restarts')
@click.option('--normalize', is_flag=True, help='L2-normalize rows first')
@item_type_option
@click.option('--output', '-o', type=click.Path(dir_okay=False), required=True,
              help='Output labels CSV')
@click.pass_context
@handle_errors
def cluster_kmeans_cmd(ctx, embedding_file, k, seed, normalize, item_type, output):
    """k-means with k-means++ seeding and 20 restarts."""
    started = time.perf_counter()
    seed = _resolve_seed(ctx, seed)
    embedding = read_embedding_csv(embedding_file)
    assignment = community_cluster_km(embedding, type=item_type, cluster_number=k, seed=seed,
                                      normalize=normalize)
    outputs = [write_cluster_csv(assignment.labels, output)]
    manifest = _record_run(ctx, manifest_path(output), started, [embedding_file], outputs)
    console.print(get_cluster_report(assignment), soft_wrap=True)
    _report_outputs(outputs, manifest)


@cluster.command('dbscan')
@click.argument('embedding_file', type=click.Path(dir_okay=False))
@click.option('--eps', type=float, default=DEFAULT_EPS, show_default=True,
              help='Neighbourhood radius')
@click.option('--min-pts', type=int, default=DEFAULT_MIN_PTS, show_default=True,
              help='Neighbours (self included) that make a core point')
@item_type_option
@click.option('--output', '-o', type=click.Path(dir_okay=False), required=True,
              help='Output labels CSV')
@click.pass_context
@handle_errors
def cluster_dbscan_cmd(ctx, embedding_file, eps, min_pts, item_type, output):
    """DBSCAN; noise points get label -1."""
    started = time.perf_counter()
    embedding = read_embedding_csv(embedding_file)
    assignment = community_cluster_dbscan(embedding, type=item_type, eps_value=eps,
                                          pts_value=min_pts)
    outputs = [write_cluster_csv(assignment.labels, output)]
    manifest = _record_run(ctx, manifest_path(output), started, [embedding_file], outputs)
    console.print(get_cluster_report(assignment), soft_wrap=True)
    _report_outputs(outputs, manifest)


@cluster.command('spectral')
@click.argument('tensor_file', type=click.Path(dir_okay=False))
@click.option('--k', type=int, required=True, help='Number of clusters')
@click.option('--embedding-type', type=click.Choice(['node', 'layer'], case_sensitive=False),
              default='layer', show_default=True, help='Cluster nodes (Sum-Adj) or layers (M3-SC)')
@click.option('--rank', type=int, help='Embedding columns (default k)')
@click.option('--binarize', 'binarize_threshold', type=float,
              help='Set entries above this threshold to 1 and the rest to 0')
@click.option('--seed', type=int, help='Root seed for the k-means restarts')
@click.option('--output', '-o', type=click.Path(dir_okay=False), required=True,
              help='Output labels CSV')
@click.pass_context
@handle_errors
def cluster_spectral_cmd(ctx, tensor_file, k, embedding_type, rank, binarize_threshold, seed, output):
    """Spectral clustering: a spectral embedding followed by k-means."""
    started = time.perf_counter()
    seed = _resolve_seed(ctx, seed)
    tensor, _ = _load_tensor(tensor_file, None, binarize_threshold)
    kind = EmbeddingType.parse(embedding_type)
    embedding = spec_embedding(tensor, rank or k, kind)
    assignment = community_cluster_km(embedding, type='n' if kind is EmbeddingType.NODE else 'N',
                                      cluster_number=k, seed=seed)
    outputs = [write_cluster_csv(assignment.labels, output)]
    manifest = _record_run(ctx, manifest_path(output), started, [tensor_file], outputs)
    console.print(get_cluster_report(assignment), soft_wrap=True)
    _report_outputs(outputs, manifest)


@cluster.command('eval')
@click.argument('labels_file', type=click.Path(dir_okay=False))
@click.option('--truth', required=True, type=click.Path(dir_okay=False),
              help='Planted labels (.txt sidecar or labels CSV)')
@click.option('--column', type=int, default=0, show_default=True,
              help='Column of a multi-column sidecar (network type for node labels)')
@handle_errors
def cluster_eval_cmd(labels_file, truth, column):
    """
    Misclustering rate of a clustering against planted labels.

    Example:

        multinet cluster eval layers.labels.csv --truth net.layers.txt
    """
    predicted = _read_any_labels(labels_file)
    planted = _read_any_labels(truth, column=column)
    rate = misclustering_rate(predicted, planted)
    console.print(f"misclustering rate: {rate:.6f}", soft_wrap=True)


# --------------------------------------------------------------------------- plot

@cli.group()
def plot():
    """Scatter plots of embeddings."""


@plot.command('embedding')
@click.argument('embedding_file', type=click.Path(dir_okay=False))
@click.option('--paxis', type=int, default=2, show_default=True,
              help='Eigenvectors to plot, starting at the 2nd (0-based column 1); '
                   '2 gives eigenvector 2 against eigenvector 3')
@click.option('--labels', 'labels_file', type=click.Path(dir_okay=False),
              help='Labels used for colouring')
@click.option('--title', help='Figure title')
@click.option('--output', '-o', type=click.Path(dir_okay=False), required=True,
              help='Output SVG file')
@click.pass_context
@handle_errors
def plot_embedding_cmd(ctx, embedding_file, paxis, labels_file, title, output):
    """Pairwise scatter panels of embedding eigenvectors, written as SVG plus CSV."""
    started = time.perf_counter()
    embedding = read_embedding_csv(embedding_file)
    labels = _read_any_labels(labels_file) if labels_file else None
    embedding_network(embedding, output, paxis=paxis, labels=labels, title=title)

    inputs = [embedding_file] + ([labels_file] if labels_file else [])
    outputs = [Path(output), Path(output).with_suffix('.csv')]
    manifest = _record_run(ctx, manifest_path(output), started, inputs, outputs)
    _report_outputs(outputs, manifest)


# --------------------------------------------------------------------------- inspection

@cli.command()
@click.argument('tensor_file', type=click.Path(dir_okay=False))
@click.option('--dataset', help='Check dims against a known dataset')
@handle_errors
def info(tensor_file, dataset):
    """
    Show basic information about a TNS3 tensor file.

    Example:

        multinet info net.tns
    """
    _, metadata = _load_tensor(tensor_file, dataset, None)

    console.print(Panel.fit(
        f"[bold]{escape(metadata['file_name'])}[/bold]\n"
        f"Dims: {' x '.join(str(d) for d in metadata['dims'])}\n"
        f"Nonzeros: {metadata['nonzeros']:,}\n"
        f"Duplicates: {metadata['duplicates']}",
        title="Tensor Information"
    ))

    table = Table(title="Structure")
    table.add_column("Property", style="cyan")
    table.add_column("Value", style="green")
    for key in ('density', 'binary', 'nonnegative', 'symmetric_layers', 'zero_diagonal',
                'mean_degree', 'dataset'):
        if key in metadata:
            table.add_row(key, str(metadata[key]))
    console.print(table)


@cli.command()
def datasets():
    """List the reference datasets and their expected dims."""
    table = Table(title="Datasets")
    table.add_column("Name", style="cyan", no_wrap=True)
    table.add_column("Dims", style="green", no_wrap=True)
    table.add_column("Provenance")
    for descriptor in dataset_descriptors():
        table.add_row(descriptor.name, ' x '.join(str(d) for d in descriptor.dims),
                      descriptor.provenance)
    console.print(table)


@cli.command()
@click.argument('manifest_file', type=click.Path(dir_okay=False))
@handle_errors
def rerun(manifest_file):
    """
    Replay the command recorded in a run manifest.

    Outputs are rewritten byte-for-byte identical to the original run.
    """
    manifest = load_manifest(manifest_file)
    if not manifest.argv:
        raise ArgumentError(f"Manifest {manifest_file} records no command")
    if manifest.version != __version__:
        logger.warning(f"Manifest written by multinet {manifest.version}, running {__version__}")

    console.print(f"Replaying: multinet {escape(' '.join(manifest.argv))}", soft_wrap=True)
    try:
        cli.main(args=list(manifest.argv), prog_name='multinet', standalone_mode=False)
    except click.ClickException as e:
        e.show()
        sys.exit(e.exit_code)


def main():
    """Main entry point."""
    cli()


if __name__ == '__main__':
    main()
