"""pytest plugin: make every benchmark entry point raise, to prove a run never touches one."""
import hsicopt.benchmarks as benchmarks


def _blocked(*args, **kwargs):
    raise RuntimeError("benchmark executed during a property-only run")


def pytest_configure(config):
    for name in dir(benchmarks):
        obj = getattr(benchmarks, name)
        if callable(obj) and getattr(obj, "__module__", None) == benchmarks.__name__:
            setattr(benchmarks, name, _blocked)
    for key in benchmarks.CATALOG:
        benchmarks.CATALOG[key] = _blocked
