"""Python access to the coursegate engine.

Structured values are plain dicts and lists; errors raise CoursegateError with
the engine's error code in ``.code``.
"""

import json

from . import _coursegate as _core

__all__ = [
    "CoursegateError",
    "Registry",
    "aggregate",
    "check_track",
    "classify_scale",
    "content_hash",
    "derive_subset",
    "execute",
    "lammps_stub",
    "list_next",
    "normalize_module",
    "parse_duration",
    "plan_track",
    "topo_layers",
    "validate_meta",
    "validate_workflow",
]


class CoursegateError(Exception):
    def __init__(self, code, message, details=None):
        super().__init__(f"{code}: {message}")
        self.code = code
        self.message = message
        self.details = details


def _call(fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except _core.CoursegateError as exc:
        code, message, details = exc.args
        raise CoursegateError(code, message, json.loads(details)) from None


def _text(value):
    return value if isinstance(value, str) else json.dumps(value)


def classify_scale(minutes):
    """Returns (level, oversize) for a duration in minutes."""
    return _call(_core.classify_scale, minutes)


def parse_duration(text):
    """Minutes in a duration such as "2 weeks"."""
    return _call(_core.parse_duration, text)


def validate_meta(module, known_ids=()):
    return json.loads(_call(_core.validate_meta, _text(module), list(known_ids)))


def normalize_module(module):
    return json.loads(_call(_core.normalize_module, _text(module)))


class Registry:
    def __init__(self, created_at=None):
        self._r = _core.Registry() if created_at is None else _core.Registry(created_at)

    def register_module(self, module):
        return _call(self._r.register_module, _text(module))

    def get(self, module_id):
        found = self._r.get(module_id)
        return None if found is None else json.loads(found)

    def modules(self):
        return json.loads(self._r.modules())

    def search(self, **query):
        return json.loads(_call(self._r.search, json.dumps(query)))

    def rate(self, module_id, stars):
        return json.loads(_call(self._r.rate, module_id, stars))

    def register_workflow(self, workflow):
        _call(self._r.register_workflow, _text(workflow))

    def export_repository(self):
        return self._r.export_repository()

    def import_repository(self, archive):
        return json.loads(_call(self._r.import_repository, archive))

    def __len__(self):
        return len(self._r)


def plan_track(target, modules, constraints=None):
    return json.loads(_call(_core.plan_track, target, _text(modules), _text(constraints or {})))


def check_track(track, modules, constraints=None):
    return json.loads(_call(_core.check_track, _text(track), _text(modules), _text(constraints or {})))


def aggregate(track, modules):
    return json.loads(_call(_core.aggregate, _text(track), _text(modules)))


def list_next(module_id, modules):
    return _call(_core.list_next, module_id, _text(modules))


def validate_workflow(workflow):
    return json.loads(_call(_core.validate_workflow, _text(workflow)))


def topo_layers(workflow):
    return _call(_core.topo_layers, _text(workflow))


def derive_subset(workflow, keep):
    return json.loads(_call(_core.derive_subset, _text(workflow), sorted(keep)))


def execute(workflow, pool, policy="round_robin", seed=0, worker_limit=4):
    """Runs a workflow to completion; the record includes artifact bytes."""
    return json.loads(_call(_core.execute, _text(workflow), _text(pool), policy, seed, worker_limit))


def lammps_stub(params=None, seed=0):
    return _call(_core.lammps_stub, {k: str(v) for k, v in (params or {}).items()}, seed)


def content_hash(data):
    return _core.content_hash(data if isinstance(data, bytes) else data.encode())
