"""
Command-line interface: test, cdtree, reduce, gen and stats

Exit codes: 0 c-planar / feasible, 1 not c-planar / infeasible,
2 usage or input error, 3 capacity exceeded.
"""
import json
from functools import wraps

import click
from flask import current_app
from flask.cli import with_appcontext

from cdplan.models.clustered_graph import ClusteredGraph
from cdplan.services import solver
from cdplan.services.cdtree_builder import build, cut_total, reroot, size_c
from cdplan.services.errors import CapacityError, CdPlanError
from cdplan.services.generator import MODES, GeneratorConfig, generate
from cdplan.services.reductions import DIRECTIONS, VARIANTS, reduce_instance
from cdplan.utils.dot import cdtree_to_dot
from cdplan.utils.instance_io import load, serialize, to_data
from cdplan.utils.validation import ALGORITHMS

EXIT_YES = 0
EXIT_NO = 1
EXIT_INPUT = 2
EXIT_CAPACITY = 3


def guarded(command):
    """Map service errors to exit codes with diagnostics on stderr"""
    @wraps(command)
    def wrapper(*args, **kwargs):
        ctx = click.get_current_context()
        try:
            code = command(*args, **kwargs)
        except CapacityError as e:
            current_app.logger.error(f"Capacity exceeded: {str(e)}")
            click.echo(f"Capacity exceeded: {str(e)}", err=True)
            if e.cut_size:
                click.echo(f"Largest cut at the failing cluster: {e.cut_size} edges", err=True)
            ctx.exit(EXIT_CAPACITY)
        except (CdPlanError, OSError) as e:
            current_app.logger.error(f"{command.__name__} failed: {str(e)}")
            click.echo(f"Error: {str(e)}", err=True)
            ctx.exit(EXIT_INPUT)
        ctx.exit(code or EXIT_YES)
    return wrapper


def load_clustered(path):
    instance = load(path)
    if not isinstance(instance, ClusteredGraph):
        raise click.UsageError(f"{path} is not a clustered instance")
    return instance


@click.command('test')
@click.argument('file', type=click.Path(exists=True, dir_okay=False))
@click.option('--algorithm', type=click.Choice(ALGORITHMS), default='auto', show_default=True)
@click.option('--emit-witness', is_flag=True, help='Print the witness embedding as JSON.')
@click.option('--json', 'as_json', is_flag=True, help='Print the full verdict as JSON.')
@with_appcontext
@guarded
def test_command(file, algorithm, emit_witness, as_json):
    """Decide c-planarity of a clustered instance (or feasibility of a constrained one)."""
    verdict = solver.solve(load(file), algorithm, emit_witness=emit_witness)
    data = verdict.to_dict()
    if as_json:
        click.echo(json.dumps(data, indent=2))
    elif emit_witness and verdict.c_planar:
        click.echo(json.dumps(data.get('witness') or {'rotation': data.get('rotation')}, indent=2))
    else:
        click.echo(f"{'c-planar' if verdict.c_planar else 'not c-planar'} ({verdict.algorithm.value})")
    if verdict.reason:
        click.echo(verdict.reason, err=True)
    return EXIT_YES if verdict.c_planar else EXIT_NO


@click.command('cdtree')
@click.argument('file', type=click.Path(exists=True, dir_okay=False))
@click.option('--format', 'output_format', type=click.Choice(['dot', 'json']), default='json', show_default=True)
@click.option('--root', default=None, help='Root the cd-tree at this cluster.')
@with_appcontext
@guarded
def cdtree_command(file, output_format, root):
    """Print the cd-tree of a clustered instance."""
    ct = build(load_clustered(file))
    if root:
        ct = reroot(ct, root)
    if output_format == 'dot':
        click.echo(cdtree_to_dot(ct), nl=False)
    else:
        data = ct.to_dict()
        data['size_c'] = size_c(ct)
        data['cut_total'] = cut_total(ct)
        click.echo(json.dumps(data, indent=2))


@click.command('reduce')
@click.argument('file', type=click.Path(exists=True, dir_okay=False))
@click.option('--variant', type=click.Choice(VARIANTS), required=True)
@click.option('--direction', type=click.Choice(DIRECTIONS), default='to-constrained', show_default=True)
@with_appcontext
@guarded
def reduce_command(file, variant, direction):
    """Translate between flat clustered graphs and constrained instances."""
    click.echo(serialize(reduce_instance(load(file), variant, direction)))


@click.command('gen')
@click.option('--n', 'n', type=click.IntRange(min=1), default=8, show_default=True)
@click.option('--mode', type=click.Choice(MODES), default='flat', show_default=True)
@click.option('--clusters', type=click.IntRange(min=0), default=2, show_default=True)
@click.option('--min-size', type=int, default=2, show_default=True)
@click.option('--max-size', type=int, default=None)
@click.option('--extra-edges', type=click.IntRange(min=0), default=3, show_default=True)
@click.option('--force-connected', is_flag=True, help='Grow every cluster as a connected subgraph.')
@click.option('--edgeless-clusters', is_flag=True, help='Pick every cluster as an independent vertex set.')
@click.option('--max-outgoing', type=click.IntRange(min=0), default=None)
@click.option('--seed', type=int, default=0, show_default=True)
@with_appcontext
@guarded
def gen_command(n, mode, clusters, min_size, max_size, extra_edges, force_connected, edgeless_clusters,
                max_outgoing, seed):
    """Generate a random clustered graph with a planar underlying graph."""
    cfg = GeneratorConfig(n=n, mode=mode, clusters=clusters, min_size=min_size, max_size=max_size,
                          extra_edges=extra_edges, force_connected=force_connected,
                          max_outgoing=max_outgoing, seed=seed, edgeless_clusters=edgeless_clusters)
    click.echo(json.dumps(to_data(generate(cfg)), indent=2))


@click.command('stats')
@click.argument('file', type=click.Path(exists=True, dir_okay=False))
@click.option('--json', 'as_json', is_flag=True, help='Print the profile as JSON.')
@with_appcontext
@guarded
def stats_command(file, as_json):
    """Cluster profile, sizes and exact-test parameters of a clustered instance."""
    data = solver.instance_stats(load_clustered(file))
    if as_json:
        click.echo(json.dumps(data, indent=2))
        return
    click.echo(f"vertices: {data['vertices']}  edges: {data['edges']}  clusters: {data['cluster_count']}")
    click.echo(f"size_c: {data['size_c']}  2*cut_total: {data['twice_cut_total']}")
    click.echo(f"d (max cut degree): {data['parameters']['d']}  "
               f"k (max virtual vertices per skeleton): {data['parameters']['k']}")
    for name, value in data['flags'].items():
        click.echo(f"{name}: {'yes' if value else 'no'}")


COMMANDS = (test_command, cdtree_command, reduce_command, gen_command, stats_command)


def init_app(app):
    """Register the commands on the app's CLI group"""
    for command in COMMANDS:
        app.cli.add_command(command)
