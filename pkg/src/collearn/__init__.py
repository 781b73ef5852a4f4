"""Learning from collections of partial concept classes on finite domains."""
__version__ = "0.1.0"

from .concepts import (
    STAR,
    AllFunctionsClass,
    Domain,
    ExplicitClass,
    FiniteDistribution,
    LabeledSample,
    Predictor,
    err_class_dist,
    err_class_sample,
    err_dist,
    err_sample,
    make_rng,
    restrict,
    vc_of_restriction,
)
from .errors import BoostingError, CollearnError, InputError, InvariantViolation, ResourceError
from .growth import Collection, equivalent_on, tau_of_m, tau_of_set
from .learner import boost, collection_learn, selection_score, theorem_bound
from .oig import build_graph, loo_error, oig_predict, orient_min_outdegree
from .srm import WeightedCollection, adversarial_instance, srm_learn
