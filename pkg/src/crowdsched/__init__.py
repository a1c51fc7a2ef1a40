"""Evolutionary start-day scheduling for crowdsourced task marketplaces.

The package evolves per-task start days with an NSGA-II loop over three
objectives (project duration, similarity cost, predicted failure), backed by
a small feed-forward failure predictor and an exhaustive oracle for small
instances.  Hot kernels run from a compiled extension when available; see
``crowdsched._kernels.BACKEND``.
"""

from ._kernels import BACKEND, available_backends
from .model import (
    CorpusNorms,
    Project,
    Task,
    TaskCatalog,
    build_project,
    parse_dataset,
    parse_dependency_file,
    project_duration,
    write_dataset,
)
from .oracle import ExactFront, compare_fronts, enumerate_schedules, exact_front, hypervolume
from .platform import PlatformState, ScheduledTask, historical_state
from .predictor import (
    PredictorModel,
    TrainConfig,
    TrainingSample,
    best_start_day,
    forward,
    init_model,
    load_model,
    predict_for_day,
    samples_from_history,
    save_model,
    train,
)
from .scheduler import (
    FitnessTriple,
    GAConfig,
    ParetoResult,
    crossover_two_point,
    crowding_distance,
    evaluate,
    evolve,
    evolve_multi,
    fast_nondominated_sort,
    init_population,
    mutate_shuffle,
    repair_dependencies,
    repair_similarity,
    schedule_acceleration,
)
from .similarity import (
    SimilarityMatrix,
    feature_vector,
    similarity_matrix,
    task_similarity,
    text_similarity,
)

__version__ = "0.1.0"
