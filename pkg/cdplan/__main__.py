"""
Command-line entry point: python -m cdplan <command> ...
"""
import os

from flask.cli import FlaskGroup

from cdplan import create_app


def _create_cli_app():
    return create_app(os.getenv('FLASK_CONFIG') or 'production')


cli = FlaskGroup(create_app=_create_cli_app, add_default_commands=False,
                 help='Clustered planarity testing via cd-trees.')


if __name__ == '__main__':
    cli()
