"""Learn an interpretable patient-group definition from a small positive
sample by mining frequent activity patterns and co-occurring codes, then
classify the whole population with sample-calibrated cut-offs."""

__version__ = "0.1.0"
