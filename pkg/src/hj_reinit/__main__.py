"""Entry Point fuer hj-reinit."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from collections.abc import Sequence

from rich.console import Console
from rich.logging import RichHandler

from hj_reinit import __version__
from hj_reinit.i18n import DEFAULT_LANGUAGE, SUPPORTED_LANGUAGES, load_locale, t
from hj_reinit.models.errors import ConfigError, ReinitError
from hj_reinit.models.settings import BUNDLED_CONFIGS, ExperimentConfig

EXIT_OK = 0

COMMANDS = ("audit", "oracle", "run", "study-refine", "study-rescale")

# stdout gehoert dem JSON-Bericht, alles fuer Menschen geht nach stderr.
_console = Console(stderr=True)
logger = logging.getLogger("hj_reinit.cli")


def main(argv: Sequence[str] | None = None) -> int:
    """Haupteinstiegspunkt fuer die CLI.

    Returns:
        Exit-Code: 0 ok, 1 interner Fehler, 2 Konfiguration oder Ein-/Ausgabe,
            3 Numerik, 4 Abnahme (nur mit --check).
    """
    parser = _build_parser()
    args = parser.parse_args(argv)
    load_locale(args.lang)
    _setup_logging(args.verbose)

    try:
        config = ExperimentConfig.load(args.config)
        if args.seed is not None:
            config.seed = args.seed
        if args.output_dir is not None:
            config.outputs.directory = args.output_dir
        report = _dispatch(args.command, config, force=getattr(args, "force", False))
        _emit(report, config)
        if args.check:
            from hj_reinit.services.pipeline import enforce

            enforce(report)
    except ReinitError as exc:
        return _report_error(exc)
    except OSError as exc:
        return _report_error(ConfigError("io_error", path=str(exc.filename or ""), reason=exc.strerror or str(exc)))
    except Exception as exc:
        logger.debug("Unerwarteter Fehler", exc_info=True)
        return _report_error(ReinitError("internal", kind=type(exc).__name__, detail=str(exc)))
    return EXIT_OK


def _report_error(exc: ReinitError) -> int:
    """JSON-Fehlerobjekt (eine Zeile) und lesbare Meldung nach stderr."""
    sys.stderr.write(json.dumps(exc.to_dict(), sort_keys=True, ensure_ascii=False) + "\n")
    _console.print(f"[red]{t('cli.failed', code=exc.code)}[/red] {exc.message}")
    return exc.exit_code


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--config",
        "-c",
        default="circle",
        metavar="PATH",
        help=f"JSON-Konfiguration oder mitgelieferter Name ({', '.join(BUNDLED_CONFIGS)})",
    )
    common.add_argument("--output-dir", "-o", default=None, metavar="DIR", help="Ausgabeverzeichnis (ueberschreibt outputs.directory)")
    common.add_argument("--seed", type=int, default=None, metavar="N", help="Seed fuer Zufallsziehungen (ueberschreibt seed)")
    common.add_argument("--check", action="store_true", help="Abnahmepruefungen erzwingen (Exit 4 bei Verletzung)")

    parser = argparse.ArgumentParser(
        prog="hj-reinit",
        description=f"\n  hj-reinit v{__version__}\n",
        epilog=_usage_examples(),
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("--version", action="version", version=f"hj-reinit {__version__}")
    parser.add_argument(
        "--lang",
        default=DEFAULT_LANGUAGE,
        choices=SUPPORTED_LANGUAGES,
        help=f"Language ({', '.join(SUPPORTED_LANGUAGES)})",
    )
    parser.add_argument("--verbose", "-v", action="count", default=0, help="-v INFO, -vv DEBUG")

    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")
    sub.add_parser("audit", parents=[common], help="Voraussetzungen an u0, f, H pruefen")
    sub.add_parser("oracle", parents=[common], help="Gamma, beide Abstandsfelder und Kreuzvergleich")
    run = sub.add_parser("run", parents=[common], help="Loesen, Barrieren, Auswertung")
    run.add_argument("--force", action="store_true", help="Auch bei nicht bestandenem Audit loesen")
    sub.add_parser("study-refine", parents=[common], help="Gitterverfeinerungsstudie")
    sub.add_parser("study-rescale", parents=[common], help="epsilon-Tabelle der reskalierten Familie")
    return parser


def _setup_logging(verbosity: int) -> None:
    level = logging.WARNING if verbosity == 0 else logging.INFO if verbosity == 1 else logging.DEBUG
    root = logging.getLogger("hj_reinit")
    root.handlers.clear()
    root.addHandler(RichHandler(console=_console, show_path=False, rich_tracebacks=True))
    root.setLevel(level)
    root.propagate = False


def _dispatch(command: str, config: ExperimentConfig, force: bool = False) -> dict:
    # numba-Kerne erst laden, wenn wirklich gerechnet wird (--help bleibt schnell).
    from hj_reinit.services import pipeline

    output_dir = config.outputs.directory
    if command == "audit":
        report, _ = pipeline.run_audit(config)
        return report
    if command == "oracle":
        return pipeline.run_oracle(config, output_dir)
    if command == "run":
        return pipeline.run_experiment(config, output_dir, force=force)
    if command == "study-refine":
        return pipeline.run_refinement_study(config, output_dir)
    if command == "study-rescale":
        return pipeline.run_rescale_study(config, output_dir)
    raise ConfigError("unknown_command", command=command)


def _emit(report: dict, config: ExperimentConfig) -> None:
    """Bericht als JSON nach stdout und in die Datei, Zusammenfassung nach stderr."""
    from hj_reinit.services.reporter import Reporter

    name = f"report_{report['command'].replace('-', '_')}.json"
    path = Reporter.save_json(report, f"{config.outputs.directory}/{name}")
    sys.stdout.write(Reporter.build_json(report))
    rows = [{"name": check, "passed": passed} for check, passed in sorted(report.get("acceptance", {}).items())]
    if rows:
        _console.print(Reporter.build_table(t("cli.acceptance_title", name=config.name), rows, ("name", "passed")))
    _console.print(t("cli.report_saved", path=path))


def _usage_examples() -> str:
    """Gibt die Nutzungsbeispiele zurueck."""
    return """
Examples:
  hj-reinit audit --config circle
  hj-reinit oracle --config line --output-dir results/line
  hj-reinit run --config circle --check
  hj-reinit run --config my_experiment.json --seed 7 -v
  hj-reinit study-refine --config circle --check
  hj-reinit study-rescale --config circle
  hj-reinit --lang de audit --config circle_anisotropic
"""


if __name__ == "__main__":
    sys.exit(main())
