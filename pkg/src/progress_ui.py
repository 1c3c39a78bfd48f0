#!/usr/bin/env python3

import threading
from contextlib import contextmanager
from dataclasses import dataclass
from typing import Dict, List, Optional

from rich.console import Console, Group
from rich.live import Live
from rich.panel import Panel
from rich.table import Table


@dataclass
class SuiteStatus:
    name: str
    status: str  # 'queued', 'running', 'passed', 'failed'
    progress: float = 0.0
    checks_passed: int = 0
    checks_total: int = 0
    error_msg: Optional[str] = None


class ProgressUI:
    def __init__(self, console: Console):
        self.console = console
        self.suites: Dict[str, SuiteStatus] = {}
        self.lock = threading.Lock()
        self.console_buffer: List[str] = []
        self.max_buffer_lines = 20
        self._live: Optional[Live] = None

    def add_suite(self, name: str):
        with self.lock:
            self.suites[name] = SuiteStatus(name=name, status="queued")
        self._refresh_display()

    def update_suite(self, name: str, status: str, progress: float = 0.0,
                     checks_passed: int = 0, checks_total: int = 0,
                     error_msg: Optional[str] = None):
        with self.lock:
            if name in self.suites:
                suite = self.suites[name]
                suite.status = status
                suite.progress = progress
                suite.checks_passed = checks_passed
                suite.checks_total = checks_total
                suite.error_msg = error_msg

        # Refresh outside of the lock to avoid deadlock
        self._refresh_display()

    def add_console_output(self, line: str):
        if line.strip():
            with self.lock:
                self.console_buffer.append(line.strip())
                if len(self.console_buffer) > self.max_buffer_lines:
                    self.console_buffer = self.console_buffer[-self.max_buffer_lines:]
            self._refresh_display()

    @contextmanager
    def live(self):
        """Keep the suite table on screen while the block runs"""
        with Live(self.render(), console=self.console, refresh_per_second=8) as live:
            self._live = live
            try:
                yield self
            finally:
                live.update(self.render())
                self._live = None

    def _refresh_display(self):
        if self._live is not None:
            self._live.update(self.render())

    def render(self) -> Panel:
        with self.lock:
            suites = [SuiteStatus(**vars(s)) for s in self.suites.values()]
            console_lines = list(self.console_buffer)

        if not suites:
            body = "[dim]No suites[/dim]"
        else:
            table = Table(show_header=True, header_style="bold magenta")
            table.add_column("Suite", style="cyan", width=12)
            table.add_column("Checks", justify="right", width=8)
            table.add_column("Progress", style="white", width=44)
            for suite in suites:
                checks = f"{suite.checks_passed}/{suite.checks_total}" if suite.checks_total else ""
                table.add_row(suite.name, checks, self._create_progress_bar(suite))
            body = table

        parts = [body]
        if console_lines:
            parts.append("\n".join(console_lines))
        return Panel(Group(*parts), title="[bold cyan]Verification[/bold cyan]", width=100)

    @staticmethod
    def _create_progress_bar(suite: SuiteStatus) -> str:
        if suite.status == "failed":
            detail = f" {suite.error_msg}" if suite.error_msg else ""
            return f"[red]████████████████████[/red] Failed{detail}"
        if suite.status == "passed":
            return "[green]████████████████████[/green] Passed ✓"
        if suite.progress > 0:
            filled = int(suite.progress / 5)
            bar = "[cyan]" + "█" * filled + "[/cyan]" + "░" * (20 - filled)
            return f"{bar} {suite.progress:.0f}% {suite.status.title()}"
        return "[dim]░░░░░░░░░░░░░░░░░░░░[/dim] 0% Queued"

    def summary_table(self) -> Table:
        table = Table(title="Suite results", show_header=True, header_style="bold magenta")
        table.add_column("Suite", style="cyan")
        table.add_column("Result")
        table.add_column("Checks", justify="right")
        with self.lock:
            for suite in self.suites.values():
                result = "[green]PASS[/green]" if suite.status == "passed" else "[red]FAIL[/red]"
                table.add_row(suite.name, result, f"{suite.checks_passed}/{suite.checks_total}")
        return table
