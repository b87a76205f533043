"""
Instance routes: test, cd-tree, reduce, stats and generate
"""
from flask import Blueprint, Response, current_app, jsonify, request

from cdplan.models.clustered_graph import ClusteredGraph
from cdplan.services import solver
from cdplan.services.cdtree_builder import build, cut_total, reroot, size_c, validate
from cdplan.services.errors import (
    ArgumentError, CapacityError, GeneratorError, PreconditionError, SchemaError, UnsupportedInputError
)
from cdplan.services.generator import GeneratorConfig, generate
from cdplan.services.reductions import DIRECTIONS, VARIANTS, reduce_instance
from cdplan.utils.dot import cdtree_to_dot
from cdplan.utils.instance_io import from_data, to_data
from cdplan.utils.validation import (
    ALGORITHMS, CDTREE_FORMATS, flag, validate_choice, validate_generator_params, validate_instance_payload
)

bp = Blueprint('instances', __name__, url_prefix='/api')

INPUT_ERRORS = (SchemaError, ArgumentError, PreconditionError, UnsupportedInputError, GeneratorError)


def option(name, default=None):
    """Option from the query string or the body's 'options' object"""
    if name in request.args:
        return request.args[name]
    body = request.get_json(silent=True)
    options = body.get('options') if isinstance(body, dict) else None
    if isinstance(options, dict) and name in options:
        return options[name]
    return default


def load_instance():
    """Decode the request body into an instance; returns (instance, error_response)"""
    data = request.get_json(silent=True)
    is_valid, error_message = validate_instance_payload(data)
    if not is_valid:
        return None, (jsonify({'error': error_message}), 400)
    try:
        return from_data(data, request.get_data(as_text=True)), None
    except SchemaError as e:
        current_app.logger.error(f"Invalid instance: {str(e)}")
        return None, (jsonify({'error': str(e), 'field': e.field, 'line': e.line}), 400)


def load_clustered():
    instance, error = load_instance()
    if error is None and not isinstance(instance, ClusteredGraph):
        error = (jsonify({'error': 'Expected a clustered instance'}), 400)
    return instance, error


def capacity_response(e: CapacityError):
    current_app.logger.error(f"Capacity exceeded: {str(e)}")
    return jsonify(e.to_dict()), 413


@bp.route('/test', methods=['POST'])
def test_instance():
    """Decide c-planarity (or constrained feasibility) of the posted instance"""
    algorithm = option('algorithm', 'auto')
    is_valid, error_message = validate_choice(algorithm, ALGORITHMS, 'algorithm')
    if not is_valid:
        return jsonify({'error': error_message}), 400

    instance, error = load_instance()
    if error:
        return error

    try:
        verdict = solver.solve(instance, algorithm, emit_witness=flag(option('emit_witness')))
        current_app.logger.info(f"Test via {verdict.algorithm.value}: c_planar={verdict.c_planar}")
        return jsonify(verdict.to_dict()), 200

    except CapacityError as e:
        return capacity_response(e)
    except INPUT_ERRORS as e:
        current_app.logger.error(f"Test rejected: {str(e)}")
        return jsonify({'error': str(e)}), 400
    except Exception as e:
        current_app.logger.error(f"Unexpected error in test: {str(e)}")
        return jsonify({'error': 'Test failed unexpectedly'}), 500


@bp.route('/cdtree', methods=['POST'])
def cdtree():
    """cd-tree of the posted clustered graph as JSON or DOT"""
    output_format = option('format', 'json')
    is_valid, error_message = validate_choice(output_format, CDTREE_FORMATS, 'format')
    if not is_valid:
        return jsonify({'error': error_message}), 400

    cg, error = load_clustered()
    if error:
        return error

    try:
        ct = build(cg)
        if option('root'):
            ct = reroot(ct, option('root'))
        if output_format == 'dot':
            return Response(cdtree_to_dot(ct), mimetype='text/vnd.graphviz'), 200

        data = ct.to_dict()
        data['size_c'] = size_c(ct)
        data['cut_total'] = cut_total(ct)
        data['problems'] = validate(ct)
        return jsonify(data), 200

    except INPUT_ERRORS as e:
        current_app.logger.error(f"cd-tree rejected: {str(e)}")
        return jsonify({'error': str(e)}), 400
    except Exception as e:
        current_app.logger.error(f"Unexpected error building cd-tree: {str(e)}")
        return jsonify({'error': 'cd-tree construction failed unexpectedly'}), 500


@bp.route('/reduce', methods=['POST'])
def reduce():
    """Flat c-planarity <-> constrained planarity"""
    variant = option('variant', '')
    direction = option('direction', 'to-constrained')
    for value, allowed, name in ((variant, VARIANTS, 'variant'), (direction, DIRECTIONS, 'direction')):
        is_valid, error_message = validate_choice(value, allowed, name)
        if not is_valid:
            return jsonify({'error': error_message}), 400

    instance, error = load_instance()
    if error:
        return error

    try:
        result = reduce_instance(instance, variant, direction)
        current_app.logger.info(f"Reduction {variant} {direction} done")
        return jsonify(to_data(result)), 200

    except CapacityError as e:
        return capacity_response(e)
    except INPUT_ERRORS as e:
        current_app.logger.error(f"Reduction rejected: {str(e)}")
        return jsonify({'error': str(e)}), 400
    except Exception as e:
        current_app.logger.error(f"Unexpected error in reduction: {str(e)}")
        return jsonify({'error': 'Reduction failed unexpectedly'}), 500


@bp.route('/stats', methods=['POST'])
def stats():
    """Cluster profile, sizes and parameters of the posted clustered graph"""
    cg, error = load_clustered()
    if error:
        return error

    try:
        return jsonify(solver.instance_stats(cg)), 200

    except INPUT_ERRORS as e:
        current_app.logger.error(f"Stats rejected: {str(e)}")
        return jsonify({'error': str(e)}), 400
    except Exception as e:
        current_app.logger.error(f"Unexpected error in stats: {str(e)}")
        return jsonify({'error': 'Stats failed unexpectedly'}), 500


@bp.route('/gen', methods=['POST'])
def gen():
    """Generate a random clustered graph from the posted options"""
    data = request.get_json(silent=True) or {}
    is_valid, error_message = validate_generator_params(data)
    if not is_valid:
        return jsonify({'error': error_message}), 400

    try:
        cg = generate(GeneratorConfig(**data))
        return jsonify(to_data(cg)), 200

    except INPUT_ERRORS as e:
        current_app.logger.error(f"Generation rejected: {str(e)}")
        return jsonify({'error': str(e)}), 400
    except Exception as e:
        current_app.logger.error(f"Unexpected error in generator: {str(e)}")
        return jsonify({'error': 'Generation failed unexpectedly'}), 500
