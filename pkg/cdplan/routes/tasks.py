"""
Task routes: background solves and their verdicts
"""
from flask import Blueprint, current_app, jsonify, request

from cdplan.services.errors import SchemaError
from cdplan.services.solve_queue import TaskStatus, get_solve_queue
from cdplan.utils.instance_io import from_data
from cdplan.utils.validation import ALGORITHMS, flag, validate_choice, validate_instance_payload

bp = Blueprint('tasks', __name__, url_prefix='/api')


@bp.route('/tasks/solve', methods=['POST'])
def start_solve():
    """Queue a c-planarity test of the posted instance"""
    try:
        algorithm = request.args.get('algorithm', 'auto')
        is_valid, error_message = validate_choice(algorithm, ALGORITHMS, 'algorithm')
        if not is_valid:
            return jsonify({'error': error_message}), 400

        data = request.get_json(silent=True)
        is_valid, error_message = validate_instance_payload(data)
        if not is_valid:
            return jsonify({'error': error_message}), 400
        instance = from_data(data, request.get_data(as_text=True))

        task = get_solve_queue().enqueue(instance, algorithm, emit_witness=flag(request.args.get('emit_witness')))

        return jsonify({
            'message': 'Solve queued',
            'task_id': task.id,
            'instance': task.summary,
            'status_url': f"/api/tasks/{task.id}",
            'result_url': f"/api/tasks/{task.id}/result"
        }), 202

    except SchemaError as e:
        current_app.logger.error(f"Invalid instance: {str(e)}")
        return jsonify({'error': str(e), 'field': e.field, 'line': e.line}), 400
    except Exception as e:
        current_app.logger.error(f"Failed to queue solve: {str(e)}")
        return jsonify({'error': 'Failed to queue solve'}), 500


@bp.route('/tasks', methods=['GET'])
def list_tasks():
    """All solves, newest first"""
    tasks = get_solve_queue().listing()
    return jsonify({'tasks': tasks, 'total': len(tasks)}), 200


@bp.route('/tasks/stats', methods=['GET'])
def task_stats():
    return jsonify(get_solve_queue().stats()), 200


@bp.route('/tasks/<task_id>', methods=['GET'])
def task_status(task_id):
    task = get_solve_queue().get(task_id)
    if task is None:
        return jsonify({'error': 'Task not found'}), 404
    return jsonify(task.to_dict()), 200


@bp.route('/tasks/<task_id>/result', methods=['GET'])
def task_result(task_id):
    """Verdict of a finished solve; 409 while it is still queued or running"""
    task = get_solve_queue().get(task_id)
    if task is None:
        return jsonify({'error': 'Task not found'}), 404
    if task.status == TaskStatus.FAILED:
        status = 413 if task.error_type == 'CapacityError' else 400
        return jsonify(task.error_dict()), status
    if task.status != TaskStatus.COMPLETED:
        return jsonify({'error': f"Task is {task.status.value}", 'status': task.status.value}), 409
    return jsonify(task.verdict_dict()), 200


@bp.route('/tasks/<task_id>/cancel', methods=['POST'])
def cancel_task(task_id):
    if get_solve_queue().cancel(task_id):
        return jsonify({'message': 'Task cancelled'}), 200
    return jsonify({'error': 'Task not found or already started'}), 400


@bp.route('/tasks/cleanup', methods=['POST'])
def purge_tasks():
    """Forget finished solves older than max_age_hours"""
    data = request.get_json(silent=True) or {}
    max_age_hours = data.get('max_age_hours')
    if max_age_hours is not None and (isinstance(max_age_hours, bool) or not isinstance(max_age_hours, (int, float))):
        return jsonify({'error': "'max_age_hours' must be a number"}), 400
    purged = get_solve_queue().purge(max_age_hours)
    return jsonify({'message': f'Purged {purged} finished tasks', 'cleaned_count': purged}), 200
