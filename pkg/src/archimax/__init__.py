"""Archimedean copulas through their l1-norm symmetric representation."""
