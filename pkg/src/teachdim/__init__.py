"""Exact teaching-dimension computations for finite boolean hypothesis classes."""
from __future__ import annotations

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    BindingError,
    DomainError,
    InconsistentExampleError,
    InputError,
    PreconditionError,
    ResourceError,
    TeachDimError,
)
from .hypotheses import (  # noqa: E402
    HypothesisClass,
    LabeledExample,
    consistent,
    disjoint_union,
    hamming,
    load_hc,
    parse_hc,
    powerset_class,
    version_space,
    warmuth_class,
)
from .preference import (  # noqa: E402
    FamilyVerdict,
    PreferenceFunction,
    VersionSpacePattern,
    argmin_set,
    build_const,
    build_global,
    build_gvs,
    build_local_hamming,
    build_local_table,
    build_lvs,
    check_family,
    eval_sigma,
    is_collusion_free,
    load_pref,
)
from .learner import LearnerState, Trajectory, learner_step, run_protocol  # noqa: E402
from .engines import (  # noqa: E402
    INFINITY,
    DimensionResult,
    TeacherMapping,
    candidate_set,
    count_pref_relations,
    d_sigma,
    is_nonclashing,
    min_teaching_set,
    nctd,
    powerset_td_lower_bound,
    rtd,
    sigma_from_teacher,
    sigma_td_global,
    td_of_sigma,
    vcd,
    wc_td,
)
from .constructions import (  # noqa: E402
    PreferenceTree,
    double_sigma,
    find_gvs_beats_local_class,
    order_to_global_sigma,
    powerset7_tree,
    tree_to_local_sigma,
    wsls_disjoint_union_sigma,
)
