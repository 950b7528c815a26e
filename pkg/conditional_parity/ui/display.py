"""
Display module for terminal visualization
"""
from typing import Any, Dict, Iterable, List, Optional
import logging

from rich.console import Console
from rich.table import Table


class Display:
    def __init__(self, console: Optional[Console] = None):
        """Tabelas legíveis em stderr; stdout fica com o JSON"""
        self.console = console or Console(stderr=True)
        self.logger = logging.getLogger(__name__)

    def _table(self, title: str, columns: List[tuple]) -> Table:
        table = Table(
            title=title,
            show_header=True,
            header_style="bold white",
            title_style="bold magenta",
            border_style="blue",
        )
        for name, style, justify in columns:
            table.add_column(name, style=style, justify=justify)
        return table

    @staticmethod
    def _fmt(value: Any, digits: int = 4) -> str:
        if value is None:
            return "-"
        if isinstance(value, float):
            return f"{value:.{digits}g}" if abs(value) < 1e-3 and value != 0 else f"{value:.{digits}f}"
        return str(value)

    def show_test(self, report: Dict[str, Any]):
        """Resultado do teste KCI (uma linha por limiar quando há varredura)"""
        table = self._table("Teste de paridade condicional", [
            ("Limiar", "cyan", "right"),
            ("n", "white", "right"),
            ("Estatística", "yellow", "right"),
            ("p-valor", "green", "right"),
            ("Método", "magenta", "left"),
        ])
        rows = report.get('sweep') or [report]
        for row in rows:
            table.add_row(self._fmt(row.get('threshold')), str(row['n']),
                          self._fmt(row['statistic']), self._fmt(row['p_value']), str(row['method']))
        self.console.print(table)

    def show_audit(self, report: Dict[str, Any]):
        """Variação total por estrato"""
        table = self._table(f"Auditoria ({report['mode']}): ε = {self._fmt(report['epsilon_hat'])}", [
            ("Estrato", "cyan", "left"),
            ("TV máx.", "yellow", "right"),
        ])
        for row in report['per_stratum']:
            table.add_row(str(row['stratum']), self._fmt(row['tv']))
        for stratum in report.get('skipped_strata', []):
            table.add_row(f"{stratum} (pulado)", "-", style="dim")
        self.console.print(table)

    def show_brier(self, rows: Iterable[Dict[str, Any]]):
        """Tabela de Brier por decisão e grupo"""
        table = self._table("Score de Brier por tipo de decisão", [
            ("Decisão", "cyan", "left"),
            ("Grupo a", "white", "right"),
            ("Esperado", "green", "right"),
            ("Amostral", "yellow", "right"),
        ])
        for row in rows:
            table.add_row(row['decision'], str(row['group']),
                          self._fmt(row['expected']), self._fmt(row.get('sample')))
        self.console.print(table)

    def show_kernels(self, artifact: Dict[str, Any]):
        """Resumo do par de kernels"""
        table = self._table("Kernels de Markov", [
            ("k", "cyan", "right"),
            ("k1", "cyan", "right"),
            ("Objetivo", "yellow", "right"),
            ("Resíduo de paridade", "green", "right"),
        ])
        table.add_row(str(artifact['k']), str(artifact['k1']),
                      self._fmt(artifact['objective']), self._fmt(artifact['parity_residual']))
        self.console.print(table)

    def show_sem(self, report: Dict[str, Any]):
        """Veredito de uma verificação em SEM"""
        verdict = "[green]sim[/green]" if report['verdict'] else "[red]não[/red]"
        table = self._table(f"SEM: {report['check']}", [
            ("Campo", "cyan", "left"),
            ("Valor", "white", "left"),
        ])
        table.add_row("vale", verdict)
        for key, value in sorted(report.get('details', {}).items()):
            table.add_row(key, self._fmt(value))
        self.console.print(table)

    def show_debias(self, report: Dict[str, Any]):
        table = self._table("Remoção do subespaço de viés", [
            ("Posto", "cyan", "right"),
            ("Dimensão", "white", "right"),
            ("Linhas", "white", "right"),
            ("max |<x', b>|", "green", "right"),
        ])
        table.add_row(str(report['rank']), str(report['dim']), str(report['rows']),
                      self._fmt(report['max_inner_product']))
        self.console.print(table)
