# hypothesis imports this module lazily inside @given tests, where pytest's assertion rewriter would then try to
# create its __pycache__ dir through os.makedirs, which BaseUnitTestCase disables. Import it at collection time.
import hypothesis.internal.conjecture.optimiser  # noqa: F401


# genty's @genty runs functools.update_wrapper(func, func) on test methods without a dataset, leaving
# func.__wrapped__ pointing at func itself; pytest's get_real_func cannot unwrap that loop. Drop the self-reference.
def pytest_collection_modifyitems(items):
    for item in items:
        func = getattr(item.cls, '__dict__', {}).get(item.name) if item.cls else None
        if func is not None and getattr(func, '__wrapped__', None) is func:
            del func.__wrapped__
