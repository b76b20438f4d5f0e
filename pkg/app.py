# app.py
# -----------------------------------------------------------------------------
# rdlab: laboratório de decaimento rápido (RD) em grupos finitamente gerados
# - Subcomandos: growth, rd-profile, opnorm, section, cocycles,
#   decompose-check, length-ineq, distortion, aut-growth, all, print-config
# - Config JSON5 (--config) < flags (--seed, --radius, --out, --format)
# - Log no terminal (rich) + run.log com timestamps no diretório de saída
# -----------------------------------------------------------------------------

from __future__ import annotations

import logging
from pathlib import Path
from typing import Optional

import typer
from rich.console import Console
from rich.logging import RichHandler
from rich.markup import escape

from config import Config, load_experiment_config
from lib.errors import ConfigError, RdLabError
from lib.runner import EXIT_USAGE, SUBCOMMANDS, run

app = typer.Typer(help="Laboratório RD: métricas de palavra, normas de convolução e extensões")
console = Console()

# raio afetado por --radius em cada subcomando
RADIUS_KEYS = {
    "growth": "ball",
    "rd-profile": "rd",
    "opnorm": "m",
    "section": "section",
    "cocycles": "cocycles",
    "decompose-check": "decompose",
    "length-ineq": "length",
    "distortion": "distortion",
    "aut-growth": "aut",
    "all": "ball",
}


def setup_logging(out_dir: Optional[Path]) -> None:
    root = logging.getLogger()
    for h in list(root.handlers):
        root.removeHandler(h)
    root.setLevel(Config.LOG_LEVEL)
    root.addHandler(RichHandler(console=Console(stderr=True), show_path=False, rich_tracebacks=False))
    if out_dir is not None:
        out_dir.mkdir(parents=True, exist_ok=True)
        fh = logging.FileHandler(out_dir / "run.log", encoding="utf-8")
        fh.setFormatter(logging.Formatter("%(asctime)s %(levelname)s %(name)s: %(message)s"))
        root.addHandler(fh)


@app.command()
def main(
    subcommand: Optional[str] = typer.Argument(None, help=f"Um de: {', '.join(SUBCOMMANDS)}"),
    config: Optional[Path] = typer.Option(None, "--config", help="Arquivo de configuração JSON5"),
    out: Optional[Path] = typer.Option(None, "--out", help="Diretório dos relatórios"),
    seed: Optional[int] = typer.Option(None, "--seed", help="Semente do gerador"),
    radius: Optional[int] = typer.Option(None, "--radius", min=0, help="Raio principal do subcomando"),
    report_format: Optional[str] = typer.Option(None, "--format", help="csv ou json"),
    group: Optional[str] = typer.Option(None, "--group", help="Grupo do catálogo (sobrepõe a config)"),
    print_config: bool = typer.Option(False, "--print-config", help="Imprime a config resolvida e sai"),
) -> None:
    """Executa um subcomando e grava relatórios com o digest da config."""
    try:
        cfg = load_experiment_config(config)
        key = RADIUS_KEYS.get(subcommand or "")
        cfg = cfg.with_overrides(
            seed=seed,
            out=out,
            report_format=report_format,
            radius={key: radius} if radius is not None and key else None,
            group=group,
        )
    except ConfigError as e:
        console.print(f"[red]config error:[/red] {escape(str(e))}", soft_wrap=True)
        raise typer.Exit(code=EXIT_USAGE)

    if print_config or subcommand == "print-config":
        console.print(cfg.to_text(), end="", markup=False, highlight=False, soft_wrap=True)
        raise typer.Exit(code=0)
    if subcommand is None:
        console.print("[red]missing subcommand[/red]")
        raise typer.Exit(code=EXIT_USAGE)

    setup_logging(Path(cfg.run.output_dir))
    try:
        result = run(subcommand, cfg)
    except RdLabError as e:
        console.print(f"[red]error:[/red] {escape(str(e))}", soft_wrap=True)
        raise typer.Exit(code=EXIT_USAGE)

    for line in result.summaries:
        console.print(line, markup=False, highlight=False, soft_wrap=True)
    if result.error:
        console.print(f"[red]error:[/red] {escape(result.error)}", soft_wrap=True)
    raise typer.Exit(code=result.status)


if __name__ == "__main__":
    app()
