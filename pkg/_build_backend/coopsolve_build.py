"""
Build backend wrapper.

setup.py in this checkout is the project's environment helper script (it
creates .env and the output/log directories), not a setuptools script, so
the backend must not execute it. Metadata comes from pyproject.toml.
"""

from setuptools import build_meta as _orig
from setuptools.build_meta import _BuildMetaBackend


class _Backend(_BuildMetaBackend):
    def run_setup(self, setup_script='setup.py'):
        # A missing script makes setuptools fall back to a bare setup() call.
        super().run_setup(setup_script='__no_setup_script__.py')


_backend = _Backend()

get_requires_for_build_wheel = _backend.get_requires_for_build_wheel
get_requires_for_build_sdist = _backend.get_requires_for_build_sdist
prepare_metadata_for_build_wheel = _backend.prepare_metadata_for_build_wheel
build_wheel = _backend.build_wheel
build_sdist = _backend.build_sdist
get_requires_for_build_editable = _backend.get_requires_for_build_editable
prepare_metadata_for_build_editable = _backend.prepare_metadata_for_build_editable
build_editable = _backend.build_editable
