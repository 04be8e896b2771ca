"""Numerical verification toolkit for refinement inequalities between
discrete averages of superquadratic and subquadratic functions."""

from .averages import (AverageValue, accurate_sum, avg_A, avg_B, avg_general,
                       diff_D, diff_Delta, diff_E, diff_H, diff_R)
from .bounds import (BoundReport, THEOREMS, remark3_upper, thm1_lower,
                     thm2_lower, thm3_lower, thm8_upper, thm9_upper,
                     thm10_checks, thmA_lower, thmB_lower, thm_upper_A_general,
                     thm_upper_A_positive, thm_upper_B, thm_upper_seq,
                     thm_upper_seq_c)
from .functions import (Certificate, FunctionModel, SupportConstantPolicy,
                        by_spec, catalog, check_monotone_convex_positive,
                        check_subquadratic, check_superquadratic, eval_many,
                        support_constant, zero_model)
from .harness import (SearchResult, SweepResult, SweepSpec, emit_report,
                      main, minimize_margin, run_sweep)
from .refinements import (ChainEvaluation, jensen_refinement, lemma1_chain,
                          lemma2_bound, lemma3_bound)
from .sequences import (ConditionReport, Sequence, cond_B, cond_c_three_seq,
                        cond_III, cond_ratio_le_2, cond_T1, generate,
                        increments_increasing, is_increasing,
                        parse_sequence_spec)

__version__ = "0.1.0"
