"""
Main CLI
Entry point for solving games, generating datasets, training and evaluating
payoff models, sweeps, feature attribution and the EU case study.
"""

import sys
import logging
import argparse
from pathlib import Path

# Add project root to path
sys.path.insert(0, str(Path(__file__).parent))

from config.config import Config
from utils.logging_config import setup_logging
from utils.run_state import RunStateManager
from coopsolve import __version__
from coopsolve.datagen import TEST_DISTRIBUTIONS
from coopsolve.errors import CoopSolveError, IngestError
from coopsolve.games import parse_weights
from pipeline.runners.common import parse_float_list, parse_int_list
from pipeline.runners import (
    run_case_eu,
    run_evaluate,
    run_generate,
    run_solve,
    run_sweep,
    run_train,
    run_xai,
)
from pipeline.writers import ArtifactWriter, resolve_seed

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2
EXIT_SOLVER = 3
EXIT_IO = 4

CONCEPTS = ('shapley', 'banzhaf', 'leastcore')

COMMANDS = {
    'solve': run_solve,
    'gen': run_generate,
    'train': run_train,
    'eval': run_evaluate,
    'sweep': run_sweep,
    'xai': run_xai,
    'case-eu': run_case_eu,
}

BATCHED_COMMANDS = ('gen', 'xai')


def _common_parser() -> argparse.ArgumentParser:
    solver = Config.get_solver_config()
    mc = Config.get_mc_config()
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--seed', type=int, default=None,
                        help='Seed for every random choice (default: fresh entropy, recorded in the manifest)')
    common.add_argument('--output', default=None, help='Artifact file name')
    common.add_argument('--output-dir', default=Config.OUTPUT_DIR, help='Directory for relative artifact names')
    common.add_argument('--threads', type=int, default=Config.THREADS, help='Parallel workers')
    common.add_argument('--cap', type=int, default=solver['cap'], help='Largest n solved by enumeration')
    common.add_argument('--naive-cap', type=int, default=solver['naive_cap'],
                        help='Largest n for the naive least-core LP')
    common.add_argument('--row-cap', type=int, default=solver['row_cap'],
                        help='Largest least-core LP solved without constraint generation')
    common.add_argument('--mc-threshold', type=int, default=solver['mc_threshold'],
                        help='Ground truth switches to Monte-Carlo above this n')
    common.add_argument('--tolerance', type=float, default=solver['tol'])
    common.add_argument('--permutations', type=int, default=mc['permutations'], help='Samples per resample')
    common.add_argument('--resamples', type=int, default=mc['resamples'], help='Independent resamples')
    common.add_argument('--log-level', default=Config.LOG_LEVEL)
    common.add_argument('--quiet', action='store_true', help='Only warnings and errors on stdout')
    return common


def _add_game_arguments(parser: argparse.ArgumentParser):
    parser.add_argument('--weights', help='Comma-separated weights, e.g. 49,49,2')
    parser.add_argument('--quota', type=float)
    parser.add_argument('--game', help='JSON file {"weights": [...], "quota": q}')


def build_parser() -> argparse.ArgumentParser:
    """Argument parser with one subcommand per runner."""
    parser = argparse.ArgumentParser(prog='coopsolve', description=__doc__.strip().splitlines()[0])
    parser.add_argument('--version', action='version', version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest='command', required=True)
    common = _common_parser()

    solve = sub.add_parser('solve', parents=[common], help='Solve one game')
    _add_game_arguments(solve)
    solve.add_argument('--concept', choices=CONCEPTS, default='shapley')
    solve.add_argument('--method', choices=('auto', 'exact', 'mc', 'lp'), default='auto')
    solve.add_argument('--normalized', action='store_true', help='Normalize Banzhaf indices to sum to 1')
    solve.add_argument('--formulation', choices=('naive', 'minimal', 'incremental'), default='minimal')
    solve.add_argument('--canonical', action='store_true', help='Minimum-variance least-core payoff')

    gen = sub.add_parser('gen', parents=[common], help='Generate a labeled dataset')
    gen.add_argument('--n', type=int, help='Players per game (fixed-size dataset)')
    gen.add_argument('--n-list', help='Player counts, e.g. 4-6 or 4,5,6 (variable-size dataset)')
    gen.add_argument('--max-players', type=int, help='Padded width M (default: max of --n-list)')
    gen.add_argument('--games', type=int, default=5000, help='Games (per player count for --n-list)')
    gen.add_argument('--concept', choices=CONCEPTS, default='shapley')
    gen.add_argument('--dist', choices=('training', *TEST_DISTRIBUTIONS), default='training')
    gen.add_argument('--canonical', action='store_true')

    train = sub.add_parser('train', parents=[common], help='Train a payoff model')
    train.add_argument('--data', required=True, help='Dataset file')
    train.add_argument('--runs', type=int, default=1, help='Independent runs; the best validation loss wins')
    train.add_argument('--max-epochs', type=int, default=None)
    train.add_argument('--baseline-epochs', type=int, default=500)
    train.add_argument('--patience', type=int, default=75)
    train.add_argument('--lr', type=float, default=1e-4)
    train.add_argument('--batch-size', type=int, default=128)
    train.add_argument('--hidden', default='128,128,128', help='Hidden layer widths')
    train.add_argument('--dropout', type=float, default=0.1)
    train.add_argument('--baseline', choices=('multinomial',), default=None)

    evaluate = sub.add_parser('eval', parents=[common], help='Evaluate a model on a test distribution')
    evaluate.add_argument('--model', help='Model file')
    evaluate.add_argument('--oracle', action='store_true', help='Evaluate the exact solver itself')
    evaluate.add_argument('--baseline', choices=('weight-proportional',), default=None)
    evaluate.add_argument('--concept', choices=CONCEPTS, default=None)
    evaluate.add_argument('--dist', choices=tuple(TEST_DISTRIBUTIONS), default='in-sample')
    evaluate.add_argument('--n', type=int, required=True)
    evaluate.add_argument('--games', type=int, default=1000)
    evaluate.add_argument('--compare-canonical', action='store_true')

    sweep = sub.add_parser('sweep', parents=[common], help='Quota or weight perturbation sweep')
    _add_game_arguments(sweep)
    sweep.add_argument('--type', choices=('quota', 'weight'), required=True)
    sweep.add_argument('--eu4', action='store_true', help='Use the four-state EU council game')
    sweep.add_argument('--player', type=int, default=0, help='Player whose weight is raised')
    sweep.add_argument('--step', type=float, default=None, help='Increment (default 0.1 quota, 1.0 weight)')
    sweep.add_argument('--until', type=float, default=None, help='Last weight of a weight sweep')
    sweep.add_argument('--concept', choices=CONCEPTS, default='shapley')
    sweep.add_argument('--model', help='Model file to compare at every grid point')
    sweep.add_argument('--compare-canonical', action='store_true')

    xai = sub.add_parser('xai', parents=[common], help='Feature attribution and distillation')
    xai.add_argument('--data', required=True, help='CSV file with a header row')
    xai.add_argument('--schema', help='JSON schema: target, task, numeric, categorical, drop')
    xai.add_argument('--target', help='Target column (default: last column)')
    xai.add_argument('--task', choices=('regression', 'classification'), default=None)
    xai.add_argument('--max-depth', type=int, default=None)
    xai.add_argument('--trees', type=int, default=1, help='More than 1 fits a bootstrap random forest')
    xai.add_argument('--background', type=int, default=32, help='Background rows')
    xai.add_argument('--fractions', help='Training fractions for the sweep (default: 20 log-spaced in [0.005, 0.5])')
    xai.add_argument('--epochs', type=int, default=100)
    xai.add_argument('--hidden', default='128,128,128')
    xai.add_argument('--dropout', type=float, default=0.1)
    xai.add_argument('--speedup-fraction', type=float, default=0.1)
    xai.add_argument('--resume', action='store_true', help='Append to an existing attribution file')
    xai.add_argument('--progress', action='store_true', help='Show a progress bar')

    case = sub.add_parser('case-eu', parents=[common], help='EU council case study')
    case.add_argument('--models', required=True, help='Directory of model files')
    case.add_argument('--council-shapley', choices=('mc', 'exact'), default='mc',
                      help='Shapley ground truth for the twenty-state council')
    return parser


def check_arguments(parser: argparse.ArgumentParser, args: argparse.Namespace):
    """
    Reject flag combinations argparse cannot express; exits 2 with usage text.

    Args:
        parser: Top-level parser
        args: Parsed arguments
    """
    def fail(message: str):
        parser.error(f"{args.command}: {message}")

    needs_game = args.command == 'solve' or (args.command == 'sweep' and args.type == 'weight' and not args.eu4)
    if needs_game:
        if args.game and (args.weights or args.quota is not None):
            fail("--game cannot be combined with --weights or --quota")
        if not args.game and (args.weights is None or args.quota is None):
            fail("give either --game FILE or both --weights and --quota")
    if args.command == 'sweep' and args.type == 'quota' and not (args.eu4 or args.weights):
        fail("a quota sweep needs --weights or --eu4")
    if args.command == 'gen' and (args.n is None) == (args.n_list is None):
        fail("give exactly one of --n or --n-list")
    if args.command == 'eval' and not (args.model or args.oracle or args.baseline):
        fail("needs --model, --oracle or --baseline")

    parsers = {
        'weights': parse_weights,
        'n_list': parse_int_list,
        'hidden': parse_int_list,
        'fractions': parse_float_list,
    }
    for name, parse in parsers.items():
        text = getattr(args, name, None)
        if text:
            try:
                parse(text)
            except (CoopSolveError, ValueError) as e:
                fail(f"--{name.replace('_', '-')}: {e}")


def main(argv=None):
    """Parse arguments and run one command."""
    parser = build_parser()
    args = parser.parse_args(argv)
    check_arguments(parser, args)
    if args.command == 'sweep' and args.step is None:
        args.step = 0.1 if args.type == 'quota' else 1.0

    # Setup logging
    logger = setup_logging(Config.LOG_FILE, args.log_level, quiet=args.quiet)
    logger.info("=" * 80)
    logger.info(f"Starting coopsolve {args.command}")
    logger.info("=" * 80)

    args.seed, seed_source = resolve_seed(args.seed)
    if seed_source != 'argument':
        logger.warning(f"No --seed given; using {args.seed} from {seed_source}")

    state = RunStateManager(str(Path(args.output_dir) / Config.STATE_FILE))
    writer = ArtifactWriter(args.output_dir, args.command, vars(args), args.seed,
                            seed_source=seed_source, state=state, version=__version__)
    runner = COMMANDS[args.command]

    try:
        if args.command in BATCHED_COMMANDS:
            runner(args, writer, batch_size=Config.BATCH_SIZE)
        else:
            runner(args, writer)

        logger.info("\n" + "=" * 80)
        logger.info(f"{args.command} completed: {len(writer.written)} artifacts written")
        logger.info("=" * 80)
        return EXIT_OK

    except (IngestError, OSError) as e:
        logger.error(f"{args.command} failed reading or writing files: {e}")
        return EXIT_IO
    except (CoopSolveError, ValueError) as e:
        logger.error(f"{args.command} failed: {e}")
        return EXIT_SOLVER
    except Exception as e:
        logger.error(f"{args.command} failed with error: {e}", exc_info=True)
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
