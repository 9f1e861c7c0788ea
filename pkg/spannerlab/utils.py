# Copyright 2026 The spanner-lab developers
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

import functools
import time
from datetime import datetime


def report_progress(message: str = ""):
    """Turn a generator function into a plain function that prints its
    progress while it runs.

    The generator yields either a completed fraction in [0, 1] or a
    line of text, and its return value becomes the return value of the
    decorated function. Nothing is printed when
    ``defaults['report_progress']`` is False.

    Parameters
    ----------
    message
        Task description, shown as 'Starting <message>..' with a
        percentage and then 'Finished <message> (<duration>)'.

    """
    def decorator(func):
        @functools.wraps(func)
        def wrapper(*args, **kwargs):
            from spannerlab import defaults
            verbose = defaults['report_progress']

            prefix = f"\rStarting {message}.."
            if verbose:
                print(prefix, end="")
            steps = func(*args, **kwargs)
            last_shown = 0.
            show_finish = True
            started = datetime.now()
            while True:
                try:
                    step = next(steps)
                except StopIteration as stop:
                    result = stop.value
                    break
                if not verbose:
                    continue
                if isinstance(step, str):
                    show_finish = False
                    print("\r" + step)
                elif step - last_shown > 0.01:
                    print(f"{prefix} {step * 100:.0f} %", end="")
                    last_shown = step
                    show_finish = True

            if verbose and show_finish:
                duration = str(datetime.now() - started).split('.')[0]
                print(f"\rFinished {message} ({duration}) ")
            return result

        return wrapper
    return decorator


class Datastore(object):
    """Named values of one pipeline run, each computed on first access
    by a registered generator and cached.

    Every item is a dict holding the value under ``data`` (None until
    generated) next to its metadata. Metadata used by the store itself:

    phase : str
        Label the generation time is summed under in :meth:`timings`.
    save : bool
        Cache the generated value, default True.
    elapsed : float
        Seconds spent in the generator, without the time of nested
        generations it triggered. Set on generation.

    """
    __slots__ = ['_items', '_generators']
    # one entry per generation in progress, the time taken by its
    # nested generations so far
    _nested_time = []

    def __init__(self):
        self._items = {}
        self._generators = {}

    def __len__(self):
        return len(self._items)

    def __contains__(self, key):
        return key in self._items

    def __iter__(self):
        return iter(self.keys())

    def __str__(self):
        lines = ['Datastore']
        for key, item in self._items.items():
            pending = ' (not generated)' if item['data'] is None else ''
            lines.append(f'  {key}{pending}')
        return '\n'.join(lines)

    @staticmethod
    def _split_key(key):
        if isinstance(key, tuple):
            return key
        return key, 'data'

    def __getitem__(self, key):
        """``store[name]`` returns the value, generating it if needed.
        ``store[name, meta]`` returns a metadata value."""
        key, attr = self._split_key(key)
        if key not in self._items:
            raise KeyError(f'No data named `{key}`.')
        item = self._items[key]
        if attr not in item:
            raise KeyError(f'No metadata `{attr}` for `{key}`.')

        value = item[attr]
        if attr == 'data' and value is None and self._find_generator(key):
            value = self.generate(key, return_val=True)
        return value

    def __setitem__(self, key, val):
        key, attr = self._split_key(key)
        if key not in self._items:
            raise ValueError(f'No data named `{key}`.')
        self._items[key][attr] = val

    def __getattr__(self, key):
        if key.startswith('_'):
            raise AttributeError(key)
        return self[key]

    def keys(self):
        return list(self._items)

    def add(self, key, data, **metadata):
        """Store a value under a new name.

        Parameters
        ----------
        key : str
        data : any
            Value, or None for an item a generator will fill in.
        metadata
            Stored alongside the value.

        """
        if key in self._items:
            raise ValueError(f'Data named `{key}` already exists.')
        if 'data' in metadata:
            raise ValueError('`data` cannot be used as a metadata name.')
        self._items[key] = {'data': data, **metadata}

    def add_generator(self, keys, func, **metadata):
        """Register `func` as the producer of one or more items. A
        generator of several items returns a tuple in the order of
        `keys`. `metadata` is attached to every item."""
        if isinstance(keys, str):
            keys = (keys,)
        for key in keys:
            self.add(key, None, **metadata)
        self._generators[tuple(keys)] = func

    def _find_generator(self, key):
        for keys, func in self._generators.items():
            if key in keys:
                return keys, func
        return None

    def generate(self, key, return_val=False, **kwargs):
        """Run the generator producing `key`, record its time and cache
        the results unless their `save` metadata is False.

        Raises
        ------
        DataGenerationError
            No generator produces `key`.

        """
        found = self._find_generator(key)
        if found is None:
            raise DataGenerationError(f'No generator for data `{key}`.')
        keys, func = found

        Datastore._nested_time.append(0.)
        start = time.perf_counter()
        try:
            result = func(**kwargs)
        finally:
            total = time.perf_counter() - start
            nested = Datastore._nested_time.pop()
            if Datastore._nested_time:
                Datastore._nested_time[-1] += total
        own_time = max(total - nested, 0.)

        if len(keys) == 1:
            values = (result,)
        else:
            values = tuple(result)
            if len(values) != len(keys):
                raise DataGenerationError(
                    f'Generator of {keys} returned {len(values)} values.'
                )

        requested = None
        for key_i, value in zip(keys, values):
            item = self._items[key_i]
            item['elapsed'] = own_time / len(keys)
            if item.get('save', True):
                item['data'] = value
            if key_i == key:
                requested = value
        return requested if return_val else None

    def get_metadata(self, key, attr, value=None):
        """Metadata `attr` of `key`, or `value` if either is missing."""
        return self._items.get(key, {}).get(attr, value)

    def timings(self):
        """Generation time in seconds summed by `phase` metadata, items
        without a phase under their own name. Only generated items are
        included, in insertion order."""
        out = {}
        for key, item in self._items.items():
            if 'elapsed' in item:
                phase = item.get('phase', key)
                out[phase] = out.get(phase, 0.) + item['elapsed']
        return out


class SpannerLabError(Exception):
    """Base class of all errors raised by spanner-lab."""
    pass


class DataGenerationError(SpannerLabError):
    pass


class ConfigError(SpannerLabError, ValueError):
    """Invalid parameter or experiment configuration. The message names
    the offending field."""

    def __init__(self, field, message):
        self.field = field
        super().__init__(f"`{field}`: {message}")


class InstanceFormatError(SpannerLabError, ValueError):
    """Malformed or invalid instance file."""

    def __init__(self, line_number, message):
        self.line_number = line_number
        super().__init__(f"line {line_number}: {message}")


class DisconnectedPairError(SpannerLabError, ValueError):
    def __init__(self, u, v):
        self.pair = (u, v)
        super().__init__(f"disconnected pair ({u}, {v})")


class InvariantError(SpannerLabError, RuntimeError):
    """An internal invariant was violated. This is a bug, not bad input."""
    pass
