"""
dualchain - Dualidade e entrelaçamento de cadeias de Markov finitas.

Uso:
    python main.py <comando> --config <arquivo.json> [--out DIR] [--seed S]
                   [--nmax N] [--trials T] [--series SERIE] [--log-level NIVEL]

Comandos: build, dual, intertwine, spectrum, ssd, simulate, cutoff, verify, plotdata.
Códigos de saída: 0 sucesso, 2 inviabilidade, 1 erro ou verificação reprovada.
"""

import argparse
import logging
import sys

from rich.console import Console
from rich.panel import Panel
from rich.table import Table

from core.config import CLI_CONFIG
from core.utils import configurar_logging
from dualidade.cli import ResultadoComando, run

logger = logging.getLogger(__name__)
console = Console()


def criar_parser():
    """Cria o parser de argumentos da linha de comando."""
    parser = argparse.ArgumentParser(
        prog="dualchain",
        description="Dualidade, entrelaçamento e tempos estacionários fortes de cadeias de Markov finitas",
    )
    parser.add_argument("comando", help=f"Um de: {', '.join(CLI_CONFIG['comandos'])}")
    parser.add_argument("--config", required=True, help="Arquivo de configuração JSON da cadeia")
    parser.add_argument("--out", default=CLI_CONFIG["saida"], help="Diretório de saída")
    parser.add_argument("--seed", type=int, help="Semente mestre da simulação (u64)")
    parser.add_argument("--nmax", type=int, help="Horizonte das tabelas")
    parser.add_argument("--trials", type=int, help="Número de trajetórias simuladas")
    parser.add_argument("--series", help=f"Série do plotdata: {', '.join(CLI_CONFIG['series'])}")
    parser.add_argument("--log-level", help="Nível de log (DEBUG, INFO, WARNING, ...)")
    return parser


def mostrar_resultado(resultado: ResultadoComando):
    """Mostra o resultado de um comando no console."""
    cor = {0: "green", 2: "yellow"}.get(resultado.codigo, "red")
    texto = f"Comando: {resultado.comando}\nCódigo de saída: {resultado.codigo}"
    if resultado.erro:
        texto += f"\nErro: {resultado.erro}"
    console.print(Panel(texto, title="dualchain", border_style=cor))

    checks = resultado.resumo.get("checks")
    if isinstance(checks, dict):
        tabela = Table(title="Verificações")
        tabela.add_column("Checagem")
        tabela.add_column("Estado")
        for chave, valor in checks.items():
            estado = "[dim]ignorada[/dim]" if valor is None else ("[green]ok[/green]" if valor else "[red]falhou[/red]")
            tabela.add_row(chave, estado)
        console.print(tabela)

    for arquivo in resultado.arquivos:
        console.print(f"[cyan]{arquivo}[/cyan]")


def main(argv=None):
    """Ponto de entrada principal do programa."""
    args = criar_parser().parse_args(argv)
    configurar_logging(nivel=args.log_level)
    try:
        resultado = run(args.comando, args.config, saida=args.out, seed=args.seed,
                        n_max=args.nmax, trials=args.trials, series=args.series)
    except KeyboardInterrupt:
        console.print("\n[yellow]Execução interrompida pelo usuário.[/yellow]")
        return 1
    except Exception as e:
        logger.error(f"Erro não tratado: {e}", exc_info=True)
        console.print(f"[red]Erro: {e}[/red]")
        return 1
    mostrar_resultado(resultado)
    return resultado.codigo


if __name__ == "__main__":
    sys.exit(main())
