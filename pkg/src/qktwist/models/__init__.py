from .flat import FlatModel, FlatModelParams, build_flat_model, smoothness_predicate
