"""Hierarchical federated learning over LEO satellite constellations."""
