import argparse
import logging
import logging.config
import sys
from pathlib import Path
from typing import Callable, Dict, List, Optional

from pydantic import ValidationError

from lilbands import __version__
from lilbands.cli.commands import band, gof, limit, power, quantile
from lilbands.cli.config import RunConfig
from lilbands.core.config import settings
from lilbands.exceptions import CacheParseError, ConvergenceError, LilBandsError
from lilbands.models.enums import BandMethod, OutputFormat, StatisticFamily
from lilbands.services import set_quantile_service, set_runner
from lilbands.services.monte_carlo import MonteCarloRunner
from lilbands.services.quantile_service import QuantileService

logger = logging.getLogger(__name__)

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s - %(message)s"
NOISY_LOGGERS = ("concurrent.futures", "asyncio")

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_INVALID = 2
EXIT_IO = 3

COMMANDS: Dict[str, Callable[[RunConfig], int]] = {
    "quantile": quantile.run,
    "band": band.run,
    "gof": gof.run,
    "power": power.run,
    "limit": limit.run,
}


def setup_logging(verbose: bool = False) -> None:
    """fileConfig from LOG_CONFIG when that file exists, basicConfig on stderr otherwise"""
    config_path = Path(settings.LOG_CONFIG)
    if config_path.is_file():
        logging.config.fileConfig(config_path, disable_existing_loggers=False)
    else:
        logging.basicConfig(level=settings.LOG_LEVEL, format=LOG_FORMAT, stream=sys.stderr)
    for name in NOISY_LOGGERS:
        logging.getLogger(name).setLevel(logging.WARNING)
    if verbose:
        logging.getLogger().setLevel(logging.DEBUG)
        logging.getLogger("lilbands").setLevel(logging.DEBUG)


def _float_list(text: str) -> List[float]:
    try:
        return [float(item) for item in text.split(",") if item.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _int_list(text: str) -> List[int]:
    try:
        return [int(item) for item in text.split(",") if item.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--n", type=int, help="sample size")
    common.add_argument("--nu", type=float, help=f"penalty weight, > 1 (default {settings.DEFAULT_NU})")
    common.add_argument("--alpha", type=float, help=f"level (default {settings.DEFAULT_ALPHA})")
    common.add_argument("--reps", type=int, help=f"Monte-Carlo replicates for quantiles (default {settings.DEFAULT_REPS})")
    common.add_argument("--seed", type=int, help=f"base seed of the replicate streams (default {settings.DEFAULT_SEED})")
    common.add_argument("--threads", type=int, help="worker processes (default %d)" % settings.DEFAULT_THREADS)
    common.add_argument("--cache-dir", type=Path, help=f"quantile table cache (default {settings.CACHE_DIR})")
    common.add_argument("--out", type=Path, help="write the primary output here instead of stdout")
    common.add_argument("--format", choices=[f.value for f in OutputFormat], help="csv or json")
    common.add_argument("--verbose", action="store_true", default=None, help="debug logging on stderr")

    parser = argparse.ArgumentParser(
        prog="lilbands", description="LIL-refined goodness-of-fit tests and confidence bands for distribution functions"
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="subcommand", required=True, metavar="{quantile,band,gof,power,limit}")

    p = sub.add_parser("quantile", parents=[common], help="Monte-Carlo critical value of a statistic")
    p.add_argument("--family", choices=[f.value for f in StatisticFamily if f is not StatisticFamily.LIMIT],
                   help="statistic family (default new-sup)")

    p = sub.add_parser("band", parents=[common], help="confidence band limits as CSV")
    p.add_argument("--method", choices=[m.value for m in BandMethod], help="band construction (default new)")
    p.add_argument("--centered", action="store_true", default=None, help="only a_nj - s_nj and b_nj - s_nj")

    p = sub.add_parser("gof", parents=[common], help="test data against a hypothesized CDF")
    p.add_argument("--input", type=Path, help="data file, one value per line, # comments")
    p.add_argument("--column", help="CSV column (index or header name) to read instead of whole lines")
    p.add_argument("--cdf", help="normal | uniform | mixture:<eps>:<mu> | table:<path> (default normal)")
    p.add_argument("--pvalue-reps", type=int, help=f"replicates behind the p-value (default {settings.DEFAULT_PVALUE_REPS})")

    p = sub.add_parser("power", parents=[common], help="Delta_n and power against sparse normal mixtures")
    p.add_argument("--beta", type=float, help="sparsity exponent, eps = n^-beta, in (1/2, 1)")
    p.add_argument("--r", type=float, help="dense calibration mu = sqrt(2 r log n)")
    p.add_argument("--sparse-s", type=_float_list, help="sparse calibration exponents (default 0.5,1.25)")
    p.add_argument("--eps", type=float, help="explicit mixture weight")
    p.add_argument("--mu", type=float, help="explicit mixture shift (default 0)")
    p.add_argument("--n-grid", type=_int_list, help="sample sizes (default 100,500,2000)")
    p.add_argument("--power-reps", type=int, help="replicates per rejection rate (default 500)")

    p = sub.add_parser("limit", parents=[common], help="quantile of the Brownian bridge limit")
    p.add_argument("--m", type=int, help=f"logit grid size (default {settings.DEFAULT_LIMIT_GRID})")
    p.add_argument("--tail-check", action="store_true", default=None, help="also run the window tail checks")
    return parser


def to_config(args: argparse.Namespace) -> RunConfig:
    """Unset flags fall back to RunConfig defaults, which come from settings"""
    values = {key: value for key, value in vars(args).items() if value is not None}
    return RunConfig(**values)


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    setup_logging(bool(args.verbose))

    try:
        config = to_config(args)
    except ValidationError as e:
        for error in e.errors():
            location = ".".join(str(part) for part in error["loc"])
            print(f"lilbands: invalid {location or 'arguments'}: {error['msg']}", file=sys.stderr)
        return EXIT_INVALID

    runner = MonteCarloRunner(threads=config.threads)
    set_runner(runner)
    set_quantile_service(QuantileService(cache_dir=config.cache_dir, runner=runner))

    try:
        return COMMANDS[config.subcommand](config)
    except CacheParseError as e:
        logger.error("Corrupt cache entry: %s", e.message)
        return EXIT_IO
    except ConvergenceError as e:
        logger.error("Numerical failure: %s", e.message)
        return EXIT_FAILURE
    except (LilBandsError, ValidationError) as e:
        logger.error("%s", getattr(e, "message", e))
        return EXIT_INVALID
    except OSError as e:
        logger.error("I/O failure: %s", e)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
