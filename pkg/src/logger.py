#!/usr/bin/env python3

import logging
import threading
from datetime import datetime
from pathlib import Path
from typing import Dict, Optional

from settings import get_settings

COMPONENTS = {
    "main": "tropdyn_main",
    "geometry": "tropdyn_geometry",
    "dynamics": "tropdyn_dynamics",
    "potential": "tropdyn_potential",
    "elliptic": "tropdyn_elliptic",
    "line": "tropdyn_line",
    "kummer": "tropdyn_kummer",
}
SESSION_LOGGER = "tropdyn_session"

_LEVELS = {
    "DEBUG": logging.DEBUG,
    "INFO": logging.INFO,
    "WARNING": logging.WARNING,
    "ERROR": logging.ERROR,
    "CRITICAL": logging.CRITICAL,
}


class TropDynLogger:
    """Centralized file logging, one log per component plus a combined session log"""

    def __init__(self, log_dir: Optional[str] = None):
        self.log_dir = Path(log_dir) if log_dir else Path(get_settings().log_dir)
        self.log_dir.mkdir(parents=True, exist_ok=True)
        self.session_timestamp = datetime.now().strftime("%Y%m%d_%H%M%S")
        self.loggers: Dict[str, logging.Logger] = {}

        for component, name in COMPONENTS.items():
            self.loggers[component] = self._create_logger(name, self._filename(name))
        self.session_logger = self._create_logger(SESSION_LOGGER, self._filename(SESSION_LOGGER))

    def _filename(self, name: str) -> str:
        return f"{name}_{self.session_timestamp}.log"

    def _create_logger(self, name: str, filename: str) -> logging.Logger:
        logger = logging.getLogger(name)
        logger.setLevel(logging.DEBUG)
        logger.propagate = False

        # Prevent duplicate handlers
        if logger.handlers:
            return logger

        file_handler = logging.FileHandler(self.log_dir / filename, encoding="utf-8")
        file_handler.setLevel(logging.DEBUG)
        file_handler.setFormatter(
            logging.Formatter(
                "%(asctime)s - %(name)s - %(levelname)s - %(message)s",
                datefmt="%Y-%m-%d %H:%M:%S",
            )
        )
        logger.addHandler(file_handler)
        return logger

    def _log(self, component: str, message: str, level: str):
        numeric = _LEVELS.get(level.upper(), logging.INFO)
        self.loggers[component].log(numeric, message)
        self.session_logger.log(numeric, f"[{component.upper()}] {message}")

    def log_main(self, message: str, level: str = "INFO"):
        self._log("main", message, level)

    def log_geometry(self, message: str, level: str = "INFO"):
        self._log("geometry", message, level)

    def log_dynamics(self, message: str, level: str = "INFO"):
        self._log("dynamics", message, level)

    def log_potential(self, message: str, level: str = "INFO"):
        self._log("potential", message, level)

    def log_elliptic(self, message: str, level: str = "INFO"):
        self._log("elliptic", message, level)

    def log_line(self, message: str, level: str = "INFO"):
        self._log("line", message, level)

    def log_kummer(self, message: str, level: str = "INFO"):
        self._log("kummer", message, level)

    def get_log_files(self) -> Dict[str, Path]:
        files = {
            component: self.log_dir / self._filename(name)
            for component, name in COMPONENTS.items()
        }
        files["session"] = self.log_dir / self._filename(SESSION_LOGGER)
        return files

    def log_session_start(self):
        self.log_main("=" * 80)
        self.log_main("tropdyn session started")
        self.log_main(f"Session ID: {self.session_timestamp}")
        self.log_main(f"Log Directory: {self.log_dir.absolute()}")
        self.log_main("=" * 80)

    def log_session_end(self):
        self.log_main("=" * 80)
        self.log_main("tropdyn session ended")
        self.log_main(f"Session ID: {self.session_timestamp}")
        self.log_main("Log files created:")
        for component, path in self.get_log_files().items():
            if path.exists():
                self.log_main(f"  {component}: {path} ({path.stat().st_size} bytes)")
        self.log_main("=" * 80)


_global_logger: Optional[TropDynLogger] = None
_global_lock = threading.Lock()


def get_logger() -> TropDynLogger:
    """Get the global logger instance, creating it if needed"""
    global _global_logger
    with _global_lock:
        if _global_logger is None:
            _global_logger = TropDynLogger()
            _global_logger.log_session_start()
    return _global_logger


def shutdown_logger():
    global _global_logger
    if _global_logger is not None:
        _global_logger.log_session_end()
        for name in list(COMPONENTS.values()) + [SESSION_LOGGER]:
            logger = logging.getLogger(name)
            for handler in logger.handlers[:]:
                handler.close()
                logger.removeHandler(handler)
        _global_logger = None
