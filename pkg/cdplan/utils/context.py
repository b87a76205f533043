"""
Application-context helpers: services work inside the Flask app and as a plain library
"""
import logging
import os

from flask import current_app, has_app_context


def get_logger():
    """Flask app logger when an app context is active, module logger otherwise"""
    if has_app_context():
        return current_app.logger
    return logging.getLogger('cdplan')


def setting(name, default=None):
    """Read a configuration value from the active app or the base Config defaults"""
    if has_app_context():
        return current_app.config.get(name, default)

    from config import Config
    value = getattr(Config, name, default)
    if name == 'BRUTEFORCE_BOUND':
        capacity = os.environ.get('CDPLAN_CAPACITY')
        if capacity:
            try:
                value = int(capacity)
            except ValueError:
                get_logger().warning(f"Ignoring invalid CDPLAN_CAPACITY value: {capacity!r}")
    return value
