"""Graph queries over generalized RDF graphs, evaluated two ways.

``eval_pattern`` computes pattern values by structural recursion;
``derive`` and ``solve_query`` compute the same values by rewriting explicit
terms one rule at a time, recording a trace.
"""
__version__ = "0.1.0"

from .errors import (CheckMismatch, DivisionByZero, EmptyAggregate, EmptySelectList, EvaluationError,
                     ExprTypeError, GQLError, GQLSyntaxError, IncompatibleMatches, InvalidPattern,
                     NonDeterminismDetected, SourceMismatch, StuckTerm, TerminationViolation,
                     UnboundVariable)
from .graph import EMPTY_GRAPH, Const, Graph, Triple, Var, graph_union, is_subgraph
from .matching import (AssignmentTable, FreshVarGen, Match, MatchSet, build_match, compatible,
                       enumerate_matches, equal_up_to_renaming, image, join_match, tab)
from .expressions import Agg, Binary, Unary, aggregate, eval_family, format_expr, group_classes
from .algebra import op_bind, op_build, op_filter, op_join, op_match, op_union
from .patterns import (EMPTY, Basic, Bind, Build, Empty, Filter, Join, Union, eval_pattern,
                       scope_graph, validate)
from .queries import (Conselect, Construct, GraphResult, PairResult, Select, SolutionTable,
                      TableResult, graph_of_vars)
from .narrowing import derive, find_redex, measure, solve_query, step, step_bound
from .frontend import evaluate_query, result_conselect, result_construct, result_select
from .syntax import (format_graph, format_pattern, format_query, format_result, format_table,
                     parse_expr, parse_graph, parse_pattern, parse_query, parse_table)
