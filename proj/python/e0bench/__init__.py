from ._core import E0Error, analyze, hermitian_eig, p_plus, random_model, range_projection, validate

__all__ = ["E0Error", "analyze", "hermitian_eig", "p_plus", "random_model", "range_projection", "validate"]
