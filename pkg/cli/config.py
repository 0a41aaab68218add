import argparse

import constants


def _add_logging_args(parser: argparse.ArgumentParser):
    parser.add_argument(
        "--logging.debug",
        dest="logging.debug",
        action="store_true",
        help="Turn on debug logging.",
    )
    parser.add_argument(
        "--logging.trace",
        dest="logging.trace",
        action="store_true",
        help="Turn on trace logging.",
    )


def _add_model_data_args(parser: argparse.ArgumentParser, data: bool = True):
    parser.add_argument("model", help="Model file (JSON with R, C, pattern, restrictions).")
    if data:
        parser.add_argument("data", help="Data file (JSON with X and Y as rows of decimal strings).")


def _add_output_args(parser: argparse.ArgumentParser, formats=("report", "tsv")):
    parser.add_argument(
        "--out",
        type=str,
        default=None,
        help="Write the output here instead of stdout.",
    )
    parser.add_argument(
        "--format",
        choices=formats,
        default=formats[0],
        help="Output format.",
    )
    parser.add_argument(
        "--timings",
        action="store_true",
        help="Include per-stage timings in the output.",
    )


def _add_budget_arg(parser: argparse.ArgumentParser, help_text: str):
    parser.add_argument(
        "--budget-secs",
        dest="budget_secs",
        type=float,
        default=None,
        metavar="SECS",
        help=help_text,
    )


def _add_solve_args(parser: argparse.ArgumentParser):
    parser.add_argument(
        "--tol",
        type=float,
        default=constants.RESIDUAL_TOL,
        help="Relative residual tolerance for accepting a solution.",
    )
    parser.add_argument(
        "--real-tol",
        dest="real_tol",
        type=float,
        default=constants.REAL_TOL,
        help="Relative bound on imaginary parts of real solutions.",
    )
    parser.add_argument(
        "--lex-method",
        dest="lex_method",
        choices=("fglm", "direct"),
        default="fglm",
        help="Obtain the lex basis by order change from grevlex, or by running Buchberger under lex.",
    )


def surroots_config(argv=None) -> argparse.Namespace:
    """Returns the config for the surroots command line."""
    parser = argparse.ArgumentParser(
        prog="surroots",
        description="Stationary points of SUR likelihoods by exact polynomial algebra.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {constants.__version__}")
    _add_logging_args(parser)
    subparsers = parser.add_subparsers(dest="command", required=True)

    ideal = subparsers.add_parser("ideal", help="Dimension and degree of the maximum likelihood ideal.")
    _add_model_data_args(ideal)
    ideal.add_argument(
        "--order",
        choices=("grevlex", "lex"),
        default="grevlex",
        help="Monomial order of the Groebner basis.",
    )
    _add_budget_arg(ideal, "Abort after this many seconds (exit 3).")
    _add_output_args(ideal)

    solve = subparsers.add_parser("solve", help="All stationary points of the likelihood.")
    _add_model_data_args(solve)
    _add_solve_args(solve)
    _add_budget_arg(solve, "Abort after this many seconds (exit 3).")
    _add_output_args(solve)

    igls = subparsers.add_parser("igls", help="Iterated generalized least squares from the OLS start.")
    _add_model_data_args(igls)
    igls.add_argument(
        "--max-iter",
        dest="max_iter",
        type=int,
        default=constants.IGLS_MAX_ITER,
        help="Maximum number of alternating updates.",
    )
    igls.add_argument(
        "--tol",
        type=float,
        default=constants.IGLS_TOL,
        help="Stop when successive parameters differ by at most this much (relative).",
    )
    _add_output_args(igls, formats=("report",))

    search = subparsers.add_parser("search", help="Random datasets with many real stationary points.")
    _add_model_data_args(search, data=False)
    search.add_argument("--N", dest="N", type=int, default=None, help="Subjects per dataset (default R + C + 2).")
    search.add_argument("--trials", type=int, default=10, help="Number of random datasets.")
    search.add_argument("--seed", type=int, default=0, help="Seed of the first trial.")
    search.add_argument(
        "--range",
        dest="value_range",
        type=int,
        default=constants.RANDOM_RANGE,
        help="Entries are integers in [-range, range].",
    )
    search.add_argument(
        "--save-data",
        dest="save_data",
        type=str,
        default=None,
        help="Also write the best dataset here as a data file.",
    )
    _add_solve_args(search)
    _add_output_args(search, formats=("report",))

    grid = subparsers.add_parser("grid", help="Profile log-likelihood on a grid (two parameters only).")
    _add_model_data_args(grid)
    grid.add_argument("--xrange", nargs=2, type=float, default=(0.0, 3.0), metavar=("LO", "HI"))
    grid.add_argument("--yrange", nargs=2, type=float, default=(0.0, 3.0), metavar=("LO", "HI"))
    grid.add_argument("--steps", type=int, default=60, help="Grid intervals per axis.")
    grid.add_argument("--out", type=str, default=None, help="Write the grid here instead of stdout.")

    tables = subparsers.add_parser("tables", help="Dimension and degree tables over generic random data.")
    tables.add_argument("which", choices=("gensur", "submodels"), help="Which table to reproduce.")
    tables.add_argument("--seed", type=int, default=0, help="Seed of the random data.")
    tables.add_argument(
        "--order",
        choices=("grevlex", "lex"),
        default="grevlex",
        help="Monomial order of the Groebner bases.",
    )
    _add_budget_arg(tables, "Per-row budget; rows over budget are marked timeout.")
    _add_output_args(tables)

    return parser.parse_args(argv)
