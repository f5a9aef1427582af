"""
================================================================================
DESCRIPTIVE KEYPHRASES — Logging System
================================================================================
One package logger ("keyphrase") with console colors or JSON lines, plus a
rotating log file. Module loggers are children and propagate to it.
================================================================================
"""

import os
import sys
import json
import logging
import functools
import time
from pathlib import Path
from datetime import datetime, timezone
from typing import Optional
from logging.handlers import RotatingFileHandler

# ==================== CONFIGURATION ====================
ROOT_LOGGER_NAME = "keyphrase"
LOG_FORMAT = "%(asctime)s | %(levelname)-8s | %(name)-32s | %(message)s"
LOG_DATE_FORMAT = "%Y-%m-%d %H:%M:%S"
MAX_LOG_SIZE = 10 * 1024 * 1024  # 10 MB
BACKUP_COUNT = 5

# Record attributes copied into structured output when present
EXTRA_FIELDS = ("stage", "doc_id", "model", "artifact", "count", "duration")


class ColoredFormatter(logging.Formatter):
    """Console formatter with level colors and icons"""

    COLORS = {
        'DEBUG': '\033[36m',     # Cyan
        'INFO': '\033[32m',      # Green
        'WARNING': '\033[33m',   # Yellow
        'ERROR': '\033[31m',     # Red
        'CRITICAL': '\033[35m',  # Magenta
        'RESET': '\033[0m',
    }

    ICONS = {
        'DEBUG': '🔍',
        'INFO': '✅',
        'WARNING': '⚠️',
        'ERROR': '❌',
        'CRITICAL': '💀',
    }

    def __init__(self, use_colors: bool = True, use_icons: bool = True):
        super().__init__(LOG_FORMAT, LOG_DATE_FORMAT)
        self.use_colors = use_colors and sys.stdout.isatty()
        self.use_icons = use_icons

    def format(self, record):
        # Work on a copy: the file handler sees the same record
        record = logging.makeLogRecord(record.__dict__)
        stage = getattr(record, "stage", None)
        message = record.getMessage()
        if stage:
            message = f"[{stage}] {message}"
        if self.use_icons:
            message = f"{self.ICONS.get(record.levelname, '')} {message}"
        record.msg, record.args = message, None

        if self.use_colors:
            color = self.COLORS.get(record.levelname, '')
            record.levelname = f"{color}{record.levelname}{self.COLORS['RESET']}"

        return super().format(record)


class StructuredFormatter(logging.Formatter):
    """JSON-lines logging for batch runs"""

    def format(self, record):
        log_data = {
            "timestamp": datetime.now(timezone.utc).isoformat(),
            "level": record.levelname,
            "logger": record.name,
            "message": record.getMessage(),
        }

        if record.exc_info:
            log_data["exception"] = self.formatException(record.exc_info)

        for key in EXTRA_FIELDS:
            if hasattr(record, key):
                log_data[key] = getattr(record, key)

        return json.dumps(log_data, ensure_ascii=False, default=str)


def _log_dir() -> Path:
    return Path(os.getenv("KEYPHRASE_LOG_DIR", "logs"))


def setup_logger(
    name: str = ROOT_LOGGER_NAME,
    level: Optional[int] = None,
    log_file: Optional[str] = None,
    use_colors: bool = True,
    use_rotation: bool = True,
    structured: Optional[bool] = None,
) -> logging.Logger:
    """
    Set up the package logger with console and file handlers.

    Args:
        name: Logger name
        level: Logging level; defaults to KEYPHRASE_LOG_LEVEL or INFO
        log_file: Optional log file path (defaults to <log dir>/{name}.log)
        use_colors: Enable colored console output
        use_rotation: Enable log file rotation
        structured: Use JSON structured logging; defaults to KEYPHRASE_LOG_FORMAT=json

    Returns:
        Configured logger instance
    """
    logger = logging.getLogger(name)

    # Avoid duplicate handlers
    if logger.handlers:
        return logger

    if level is None:
        level = getattr(logging, os.getenv("KEYPHRASE_LOG_LEVEL", "INFO").upper(), logging.INFO)
    if structured is None:
        structured = os.getenv("KEYPHRASE_LOG_FORMAT", "text").lower() == "json"

    logger.setLevel(level)
    logger.propagate = False

    console_handler = logging.StreamHandler(sys.stderr)
    console_handler.setLevel(level)
    if structured:
        console_handler.setFormatter(StructuredFormatter())
    else:
        console_handler.setFormatter(ColoredFormatter(use_colors=use_colors))
    logger.addHandler(console_handler)

    if log_file is None:
        log_path = _log_dir() / f"{name}.log"
    else:
        log_path = Path(log_file)

    try:
        log_path.parent.mkdir(parents=True, exist_ok=True)
        if use_rotation:
            file_handler = RotatingFileHandler(
                log_path,
                maxBytes=MAX_LOG_SIZE,
                backupCount=BACKUP_COUNT,
                encoding='utf-8'
            )
        else:
            file_handler = logging.FileHandler(log_path, encoding='utf-8')
    except OSError as e:
        logger.warning(f"File logging disabled ({log_path}): {e}")
        return logger

    file_handler.setLevel(level)
    if structured:
        file_handler.setFormatter(StructuredFormatter())
    else:
        file_handler.setFormatter(logging.Formatter(LOG_FORMAT, LOG_DATE_FORMAT))
    logger.addHandler(file_handler)

    return logger


def get_logger(name: str = ROOT_LOGGER_NAME) -> logging.Logger:
    """Get a logger under the package logger, configuring it on first use"""
    setup_logger(ROOT_LOGGER_NAME)
    if name == ROOT_LOGGER_NAME or name.startswith(ROOT_LOGGER_NAME + "."):
        return logging.getLogger(name)
    return logging.getLogger(f"{ROOT_LOGGER_NAME}.{name}")


class LogContext:
    """Context manager that stamps extra fields (stage, model, ...) on records"""

    def __init__(self, logger: logging.Logger, **context):
        self.logger = logger
        self.context = context
        self.old_factory = None

    def __enter__(self):
        self.old_factory = logging.getLogRecordFactory()
        context = self.context
        old_factory = self.old_factory

        def record_factory(*args, **kwargs):
            record = old_factory(*args, **kwargs)
            for key, value in context.items():
                setattr(record, key, value)
            return record

        logging.setLogRecordFactory(record_factory)
        return self

    def __exit__(self, exc_type, exc_val, exc_tb):
        logging.setLogRecordFactory(self.old_factory)


def log_execution_time(logger: Optional[logging.Logger] = None):
    """Decorator to log function execution time"""

    def decorator(func):
        @functools.wraps(func)
        def wrapper(*args, **kwargs):
            _logger = logger or get_logger(func.__module__)
            start = time.perf_counter()

            try:
                result = func(*args, **kwargs)
                elapsed = time.perf_counter() - start
                _logger.info(f"{func.__name__} completed in {elapsed:.3f}s",
                             extra={"duration": round(elapsed, 3)})
                return result
            except Exception as e:
                elapsed = time.perf_counter() - start
                _logger.error(f"{func.__name__} failed after {elapsed:.3f}s: {e}")
                raise

        return wrapper
    return decorator
