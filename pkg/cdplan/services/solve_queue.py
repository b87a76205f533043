"""
Background solve queue
Runs c-planarity tests and constrained-embedding searches on worker threads
and keeps their verdicts for the task endpoints.
"""
import threading
import uuid
from datetime import datetime, timedelta, timezone
from enum import Enum
from typing import Dict, List, Optional, Union

from flask import current_app

from cdplan.models.clustered_graph import ClusteredGraph
from cdplan.models.constraints import ConstrainedInstance
from cdplan.models.verdict import Verdict
from cdplan.services import solver
from cdplan.services.errors import CapacityError, CdPlanError
from cdplan.services.reductions import FlatInstance

Instance = Union[ClusteredGraph, ConstrainedInstance, FlatInstance]


class TaskStatus(Enum):
    PENDING = 'pending'
    RUNNING = 'running'
    COMPLETED = 'completed'
    FAILED = 'failed'
    CANCELLED = 'cancelled'


FINISHED = (TaskStatus.COMPLETED, TaskStatus.FAILED, TaskStatus.CANCELLED)


def summarize(instance: Instance) -> dict:
    """Kind and size of an instance, as shown in task listings"""
    if isinstance(instance, FlatInstance):
        if instance.infeasible:
            return {'kind': 'flat', 'infeasible': True}
        summary = summarize(instance.clustered)
        summary['kind'] = 'flat'
        return summary
    summary = {
        'vertices': len(instance.graph.vertices),
        'edges': instance.graph.number_of_edges()
    }
    if isinstance(instance, ConstrainedInstance):
        summary['kind'] = 'constrained'
        summary['constraints'] = len(instance.constraints)
    else:
        summary['kind'] = 'clustered'
        summary['clusters'] = len(instance.normalized().proper_clusters())
    return summary


def _stamp(moment: Optional[datetime]) -> Optional[str]:
    return moment.isoformat() if moment else None


class SolveTask:
    """One queued solve: the instance, how to decide it, and what came out"""

    def __init__(self, instance: Instance, algorithm: str = 'auto', emit_witness: bool = False):
        self.id = str(uuid.uuid4())
        self.instance = instance
        self.algorithm = algorithm
        self.emit_witness = emit_witness
        self.summary = summarize(instance)

        self.status = TaskStatus.PENDING
        self.created_at = datetime.now(timezone.utc)
        self.started_at: Optional[datetime] = None
        self.completed_at: Optional[datetime] = None

        self.progress = 0
        self.current_step = ""
        self.verdict: Optional[Verdict] = None
        self.error: Optional[str] = None
        self.error_type: Optional[str] = None
        self.capacity: Optional[dict] = None
        self.thread: Optional[threading.Thread] = None

    @property
    def label(self) -> str:
        return f"{self.summary['kind']} solve ({self.algorithm})"

    def report(self, progress: int, step: str = ""):
        self.progress = min(100, max(0, progress))
        self.current_step = step

    def run(self):
        """Decide the instance; raises whatever the solver raises"""
        self.verdict = solver.solve(self.instance, self.algorithm, emit_witness=self.emit_witness,
                                    progress_callback=self.report)
        self.report(100, "Completed")

    def fail(self, error: Exception):
        self.error = str(error)
        self.error_type = type(error).__name__
        if isinstance(error, CapacityError):
            self.capacity = error.to_dict()

    def verdict_dict(self) -> Optional[dict]:
        """Verdict JSON with the task it belongs to"""
        if self.verdict is None:
            return None
        data = self.verdict.to_dict()
        data['task_id'] = self.id
        data['instance'] = self.summary
        return data

    def error_dict(self) -> dict:
        data = {'error': self.error, 'error_type': self.error_type}
        if self.capacity:
            data.update(self.capacity)
        return data

    def to_dict(self) -> dict:
        return {
            'id': self.id,
            'name': self.label,
            'instance': self.summary,
            'algorithm': self.algorithm,
            'emit_witness': self.emit_witness,
            'status': self.status.value,
            'created_at': _stamp(self.created_at),
            'started_at': _stamp(self.started_at),
            'completed_at': _stamp(self.completed_at),
            'progress': self.progress,
            'current_step': self.current_step,
            'c_planar': self.verdict.c_planar if self.verdict is not None else None,
            'error': self.error,
            'error_type': self.error_type
        }


class SolveQueue:
    """Solves on daemon threads, at most MAX_CONCURRENT_TASKS at a time; the rest wait in order"""

    def __init__(self, workers: Optional[int] = None):
        self.tasks: Dict[str, SolveTask] = {}
        self._workers = workers
        self.running = 0
        self.lock = threading.Lock()

    @property
    def workers(self) -> int:
        if self._workers is not None:
            return self._workers
        return current_app.config.get('MAX_CONCURRENT_TASKS', 3)

    def enqueue(self, instance: Instance, algorithm: str = 'auto', emit_witness: bool = False) -> SolveTask:
        """Queue a solve and start it when a worker is free"""
        task = SolveTask(instance, algorithm, emit_witness)
        with self.lock:
            self.tasks[task.id] = task
        current_app.logger.info(f"Queued task {task.id}: {task.label}, {task.summary}")
        self._dispatch()
        return task

    def get(self, task_id: str) -> Optional[SolveTask]:
        return self.tasks.get(task_id)

    def _dispatch(self):
        app = current_app._get_current_object()
        with self.lock:
            waiting = sorted((t for t in self.tasks.values() if t.status == TaskStatus.PENDING),
                             key=lambda t: t.created_at)
            starting = waiting[:max(self.workers - self.running, 0)]
            for task in starting:
                task.status = TaskStatus.RUNNING
                task.started_at = datetime.now(timezone.utc)
                self.running += 1
                task.thread = threading.Thread(target=self._work, args=(app, task), daemon=True)
        for task in starting:
            task.thread.start()

    def _work(self, app, task: SolveTask):
        with app.app_context():
            try:
                task.run()
                outcome = TaskStatus.COMPLETED
                app.logger.info(f"Task {task.id} decided: c_planar={task.verdict.c_planar}")
            except CdPlanError as e:
                task.fail(e)
                outcome = TaskStatus.FAILED
                app.logger.warning(f"Task {task.id} rejected: {e}")
            except Exception as e:
                task.fail(e)
                outcome = TaskStatus.FAILED
                app.logger.error(f"Task {task.id} crashed: {e}")
            with self.lock:
                task.status = outcome
                task.completed_at = datetime.now(timezone.utc)
                self.running -= 1
            self._dispatch()

    def cancel(self, task_id: str) -> bool:
        """Cancel a solve that is still waiting for a worker"""
        with self.lock:
            task = self.tasks.get(task_id)
            if task is None or task.status != TaskStatus.PENDING:
                return False
            task.status = TaskStatus.CANCELLED
            task.completed_at = datetime.now(timezone.utc)
        current_app.logger.info(f"Task {task_id} cancelled")
        return True

    def purge(self, max_age_hours: Optional[float] = None) -> int:
        """Forget finished solves older than max_age_hours (TASK_MAX_AGE_HOURS by default)"""
        if max_age_hours is None:
            max_age_hours = current_app.config.get('TASK_MAX_AGE_HOURS', 24)
        cutoff = datetime.now(timezone.utc) - timedelta(hours=max_age_hours)
        with self.lock:
            stale = [t.id for t in self.tasks.values()
                     if t.status in FINISHED and t.completed_at and t.completed_at <= cutoff]
            for task_id in stale:
                del self.tasks[task_id]
        current_app.logger.info(f"Purged {len(stale)} finished tasks")
        return len(stale)

    def listing(self) -> List[dict]:
        """Every task, newest first"""
        with self.lock:
            tasks = sorted(self.tasks.values(), key=lambda t: t.created_at, reverse=True)
            return [t.to_dict() for t in tasks]

    def stats(self) -> dict:
        with self.lock:
            verdicts = [t.verdict for t in self.tasks.values() if t.verdict is not None]
            return {
                'total_tasks': len(self.tasks),
                'running_tasks': self.running,
                'max_concurrent_tasks': self.workers,
                'status_counts': {
                    status.value: sum(1 for t in self.tasks.values() if t.status == status)
                    for status in TaskStatus
                },
                'verdicts': {
                    'c_planar': sum(1 for v in verdicts if v.c_planar),
                    'not_c_planar': sum(1 for v in verdicts if not v.c_planar)
                }
            }


_solve_queue: Optional[SolveQueue] = None


def get_solve_queue() -> SolveQueue:
    """Process-wide solve queue"""
    global _solve_queue
    if _solve_queue is None:
        _solve_queue = SolveQueue()
    return _solve_queue
