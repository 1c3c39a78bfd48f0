#!/usr/bin/env python3

import io
import os
import sys

# Add src directory to path for imports
sys.path.insert(0, os.path.join(os.path.dirname(os.path.abspath(__file__)), 'src'))

from rich.console import Console  # noqa: E402

from progress_ui import ProgressUI, SuiteStatus  # noqa: E402


def _console():
    return Console(file=io.StringIO(), width=120, force_terminal=False)


def _text(console):
    return console.file.getvalue()


def test_progress_display():
    console = _console()
    ui = ProgressUI(console)
    ui.add_suite("kummer")
    ui.add_suite("tent")

    with ui.live():
        for i in range(5):
            ui.add_console_output(f"kummer: step {i}")
            ui.update_suite("kummer", "running", progress=i * 20)
        ui.update_suite("kummer", "passed", 100, checks_passed=4, checks_total=4)
        ui.update_suite("tent", "failed", 100, checks_passed=2, checks_total=4, error_msg="density")

    assert ui.suites["kummer"].status == "passed"
    assert ui.suites["tent"].error_msg == "density"
    console.print(ui.summary_table())
    text = _text(console)
    assert "PASS" in text
    assert "FAIL" in text


def test_console_buffer_is_bounded():
    ui = ProgressUI(_console())
    for i in range(30):
        ui.add_console_output(f"line {i}")
    ui.add_console_output("   ")
    assert len(ui.console_buffer) == ui.max_buffer_lines
    assert ui.console_buffer[-1] == "line 29"


def test_progress_bar_states():
    bar = ProgressUI._create_progress_bar  # pylint: disable=protected-access
    assert "Queued" in bar(SuiteStatus("a", "queued"))
    assert "50%" in bar(SuiteStatus("a", "running", progress=50))
    assert "Passed" in bar(SuiteStatus("a", "passed", progress=100))
    assert "Failed boom" in bar(SuiteStatus("a", "failed", error_msg="boom"))


def test_unknown_suite_update_is_ignored():
    ui = ProgressUI(_console())
    ui.update_suite("missing", "running", 10)
    assert not ui.suites
