"""
Writers Package
Versioned artifact output with manifests.
"""

from .artifact_writer import ArtifactWriter, git_describe, manifest_path, resolve_seed, versioned_path

__all__ = ['ArtifactWriter', 'git_describe', 'manifest_path', 'resolve_seed', 'versioned_path']
