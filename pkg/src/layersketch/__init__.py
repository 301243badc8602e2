"""Frequency-estimation sketches: CountMin, CountSketch, learned variants and
the layered thresholded sketch, with a benchmark harness."""

from .hashing import KWiseHash, SignHash, eval_hash, eval_sign, make_hash, make_sign_hash
from .layered import (LayeredSketch, LearnedLayered, ParsimoniousLayered, PracticalSketch,
                      choose_tables, compute_threshold, layered_query, layered_update,
                      parsimonious_update, practical_query)
from .learned import (ExactTable, HeavyHitterOracle, LearnedSketch, OracleKind,
                      learned_query, learned_sketch, learned_update, predict)
from .metrics import unweighted_error, weighted_error
from .runner import AlgoSpec, ErrorReport, ExperimentPlan, run_experiment, summarize
from .sketches import (Mode, SketchTable, StreamUpdate, cm_query, cm_update, count_min,
                       count_sketch, cs_query, cs_update, query_nonneg)
from .streams import GroundTruth, Stream, ZipfSpec, build_oracle, gen_zipf, ingest
from .tail import BasicTailSketch, TailEstimator, exact_tail_norm, tail_finalize

__version__ = "0.1.0"
