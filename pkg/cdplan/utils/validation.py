"""
Request validation utilities
"""
from flask import current_app

ALGORITHMS = ('auto', 'connected', 'exact', 'naive')
CDTREE_FORMATS = ('json', 'dot')
GENERATOR_INT_FIELDS = ('n', 'clusters', 'min_size', 'max_size', 'extra_edges', 'max_outgoing', 'seed')
GENERATOR_FLAG_FIELDS = ('force_connected', 'planar', 'edgeless_clusters')


def flag(value) -> bool:
    """Interpret a query-string or JSON flag"""
    if isinstance(value, bool):
        return value
    if value is None:
        return False
    return str(value).strip().lower() in ('1', 'true', 'yes', 'on')


def validate_choice(value, allowed, name):
    """
    Check an option against its allowed values
    Returns (is_valid, error_message)
    """
    if value not in allowed:
        return False, f"Invalid {name} '{value}'; expected one of {', '.join(allowed)}"
    return True, None


def validate_instance_payload(data):
    """
    Check that a request carried an instance document
    Returns (is_valid, error_message)
    """
    if data is None:
        return False, "No instance provided"
    if not isinstance(data, dict):
        return False, "Instance must be a JSON object"
    if 'vertices' not in data and data.get('infeasible') is not True:
        return False, "Instance has no 'vertices' list"
    return True, None


def validate_generator_params(data):
    """
    Check generator options from a request body
    Returns (is_valid, error_message)
    """
    if not isinstance(data, dict):
        return False, "Generator options must be a JSON object"
    unknown = set(data) - set(GENERATOR_INT_FIELDS) - set(GENERATOR_FLAG_FIELDS) - {'mode'}
    if unknown:
        return False, f"Unknown generator options: {', '.join(sorted(unknown))}"
    for name in GENERATOR_INT_FIELDS:
        value = data.get(name)
        if value is not None and (isinstance(value, bool) or not isinstance(value, int)):
            return False, f"Generator option '{name}' must be an integer"
    for name in GENERATOR_FLAG_FIELDS:
        if name in data and not isinstance(data[name], bool):
            return False, f"Generator option '{name}' must be a boolean"
    max_vertices = current_app.config.get('GENERATOR_MAX_VERTICES', 200)
    if data.get('n', 0) > max_vertices:
        return False, f"Generator option 'n' exceeds the maximum of {max_vertices}"
    if 'mode' in data:
        return validate_choice(data['mode'], ('flat', 'nested'), 'mode')
    return True, None
