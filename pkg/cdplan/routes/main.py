from flask import Blueprint, current_app

from cdplan.services.solve_queue import get_solve_queue

bp = Blueprint('main', __name__)


@bp.route('/health')
def health():
    """Health check endpoint"""
    return {
        'status': 'healthy',
        'bounds': {
            'enumeration': current_app.config['ENUMERATION_BOUND'],
            'bruteforce': current_app.config['BRUTEFORCE_BOUND']
        },
        'running_tasks': get_solve_queue().running
    }, 200
