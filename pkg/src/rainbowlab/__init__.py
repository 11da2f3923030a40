"""Rainbow cycles in edge-colored graphs: detection, extremal families and verification."""

__version__ = "0.1.0"
