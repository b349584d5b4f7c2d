"""Package data: bundled map fixtures."""
