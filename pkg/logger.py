"""
Logging and reporting helpers.
Handles console/file logging, discrimination alerts and summary banners.
"""
import logging
import colorlog
from typing import Dict, Optional
from pathlib import Path

_HANDLER_MARK = '_fairpath_handler'

def setup_logging(log_level: str = 'INFO', log_file: Optional[str] = None):
    """
    Setup logging with color output and optional file logging.

    Args:
        log_level: Logging level (DEBUG, INFO, WARNING, ERROR)
        log_file: Path to log file
    """
    # Create logs directory if it doesn't exist
    if log_file:
        log_dir = Path(log_file).parent
        log_dir.mkdir(parents=True, exist_ok=True)

    # Color formatter for console
    color_formatter = colorlog.ColoredFormatter(
        '%(log_color)s%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        datefmt='%Y-%m-%d %H:%M:%S',
        log_colors={
            'DEBUG': 'cyan',
            'INFO': 'green',
            'WARNING': 'yellow',
            'ERROR': 'red',
            'CRITICAL': 'red,bg_white',
        }
    )

    # File formatter
    file_formatter = logging.Formatter(
        '%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        datefmt='%Y-%m-%d %H:%M:%S'
    )

    root_logger = logging.getLogger()
    root_logger.setLevel(getattr(logging, str(log_level).upper(), logging.INFO))

    # Repeated CLI invocations in one process must not stack handlers
    for handler in list(root_logger.handlers):
        if getattr(handler, _HANDLER_MARK, False):
            root_logger.removeHandler(handler)
            handler.close()

    console_handler = logging.StreamHandler()
    console_handler.setFormatter(color_formatter)
    setattr(console_handler, _HANDLER_MARK, True)
    root_logger.addHandler(console_handler)

    if log_file:
        file_handler = logging.FileHandler(log_file)
        file_handler.setFormatter(file_formatter)
        setattr(file_handler, _HANDLER_MARK, True)
        root_logger.addHandler(file_handler)

    return root_logger

def print_summary(title: str, rows: Dict[str, object]):
    """Print a banner-style summary of a run."""
    key_width = max((len(key) for key in rows), default=0) + 2
    width = max(len(title), key_width) + 28
    print("\n" + "=" * width)
    print(title)
    print("=" * width)
    for key, value in rows.items():
        if isinstance(value, float):
            value = f"{value:.6f}"
        print(f"{key + ':':<{key_width}} {value}")
    print("=" * width + "\n")

class AlertSystem:
    """Alert system for discrimination findings."""

    def __init__(self):
        self.logger = logging.getLogger(__name__)

    def send_alert(self, level: str, message: str):
        """
        Send an alert.

        Args:
            level: Alert level (INFO, WARNING, ERROR, CRITICAL)
            message: Alert message
        """
        level = level.upper()
        if level == 'INFO':
            self.logger.info(f"ALERT: {message}")
        elif level == 'WARNING':
            self.logger.warning(f"ALERT: {message}")
        elif level == 'ERROR':
            self.logger.error(f"ALERT: {message}")
        elif level == 'CRITICAL':
            self.logger.critical(f"ALERT: {message}")
        else:
            raise ValueError(f"Unknown alert level: {level}")

    def discrimination_alert(self, kind: str, direction: str, value: float, tau: float):
        """Report an effect that exceeds the threshold."""
        self.send_alert('WARNING', f"{kind} discrimination {direction}: effect {value:.4f} > tau {tau:.4f}")

    def indeterminate_alert(self, witnesses):
        """Report an indirect effect that cannot be identified."""
        self.send_alert('WARNING', f"Indirect effect unidentifiable, recanting witnesses: {', '.join(sorted(witnesses))}")
