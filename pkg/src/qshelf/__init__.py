"""Exact q-series for the shelves of Andrews-Bressoud series and their ghosts."""
from .errors import Falsified, NoStabilization, NotAUnit, OrderTooLow, QShelfError
from .hmatrix import HMatrix, TransferMatrix, build_transfer, h_build, h_limit, h_step
from .partitions import (
    ConditionProfile,
    Partition,
    count_ghost,
    count_h,
    count_official,
    enumerate_partitions,
    satisfies,
)
from .series import Series, euler_infty, product_side, theta_quotient
from .shelves import (
    EHReport,
    ShelfIndex,
    ShelfTable,
    build_by_closed_form,
    build_by_recursion,
    closed_form_ghost,
    closed_form_official,
    edge_match_check,
    eh_check,
)
from .xq import BivariateSeries, jtilde, jtildetilde, specialize

__version__ = "0.1.0"
