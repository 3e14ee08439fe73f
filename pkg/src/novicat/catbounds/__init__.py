"""Category weights and bounds for the closed one-form category invariants."""
