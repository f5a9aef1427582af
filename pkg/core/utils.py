"""
================================================================================
DESCRIPTIVE KEYPHRASES — Utility Functions
================================================================================
JSON / JSON-lines persistence, canonical hashing, provenance records and file helpers
shared by every stage of the pipeline.
================================================================================
"""

import os
import re
import json
import hashlib
import unicodedata
from pathlib import Path
from typing import Any, Dict, Iterable, Iterator, List, Optional

from .errors import ArtifactError, ProvenanceError
from .logger import get_logger

logger = get_logger("core.utils")


# ─── File Operations ─────────────────────────────────────────────────────────

def safe_json_load(filepath: str | Path, default: Any = None) -> Any:
    """Load a JSON file, returning default (or {}) when it is missing or broken"""
    try:
        path = Path(filepath)
        if path.exists():
            with open(path, 'r', encoding='utf-8') as f:
                return json.load(f)
    except (json.JSONDecodeError, UnicodeDecodeError, OSError) as e:
        logger.warning(f"Error loading {filepath}: {e}")
    return default if default is not None else {}


def save_json(data: Any, filepath: str | Path, indent: int = 2) -> Path:
    """Save data as JSON with sorted keys so reruns produce identical bytes"""
    path = Path(filepath)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)

        with open(path, 'w', encoding='utf-8', newline='\n') as f:
            json.dump(data, f, ensure_ascii=False, indent=indent, sort_keys=True)
            f.write('\n')
    except OSError as e:
        raise ArtifactError(f"Could not write {path}: {e}") from e
    return path


def write_jsonl(records: Iterable[Dict[str, Any]], filepath: str | Path) -> int:
    """Write one JSON object per line; returns the number of lines written"""
    path = Path(filepath)
    path.parent.mkdir(parents=True, exist_ok=True)
    count = 0
    with open(path, 'w', encoding='utf-8', newline='\n') as f:
        for record in records:
            f.write(json.dumps(record, ensure_ascii=False, sort_keys=True))
            f.write('\n')
            count += 1
    return count


def read_jsonl(filepath: str | Path) -> Iterator[Dict[str, Any]]:
    """Iterate over the JSON objects of a JSON-lines file"""
    with open(filepath, 'r', encoding='utf-8') as f:
        for line in f:
            line = line.strip()
            if line:
                yield json.loads(line)


def ensure_directory(path: str | Path) -> Path:
    """Ensure directory exists, create if not"""
    dir_path = Path(path)
    dir_path.mkdir(parents=True, exist_ok=True)
    return dir_path


def sanitize_filename(filename: str, max_length: int = 100) -> str:
    """
    Turn a model or artifact name into a portable file name.
    Safe for Windows, macOS, and Linux.
    """
    filename = unicodedata.normalize('NFKD', filename)
    filename = re.sub(r'[<>:"/\\|?*\x00-\x1f+\s]', '_', filename)
    filename = filename.strip('. ')

    if len(filename) > max_length:
        name, ext = os.path.splitext(filename)
        filename = name[:max_length - len(ext)] + ext

    return filename or "untitled"


def get_file_hash(filepath: str | Path, algorithm: str = "sha256") -> str:
    """Calculate a file digest"""
    hash_func = hashlib.new(algorithm)
    with open(filepath, 'rb') as f:
        for chunk in iter(lambda: f.read(8192), b''):
            hash_func.update(chunk)
    return hash_func.hexdigest()


# ─── Hashing ─────────────────────────────────────────────────────────────────

def canonical_json(data: Any) -> str:
    """Compact, key-sorted JSON used for checksums and config hashes"""
    return json.dumps(data, ensure_ascii=False, sort_keys=True, separators=(',', ':'), default=str)


def stable_hash(data: Any) -> str:
    """SHA-256 of the canonical JSON form of data"""
    return hashlib.sha256(canonical_json(data).encode('utf-8')).hexdigest()


# ─── Provenance ──────────────────────────────────────────────────────────────

def write_provenance(filepath: str | Path, artifact: str, config_hash: str, **details: Any) -> Path:
    """Record which configuration produced an artifact (no timestamps)"""
    record = {"artifact": artifact, "config_hash": config_hash}
    record.update(details)
    return save_json(record, filepath)


def read_provenance(filepath: str | Path, expected_hash: Optional[str] = None) -> Dict[str, Any]:
    """Load a provenance record, checking its config hash when one is expected"""
    record = safe_json_load(filepath, default=None)
    if not record:
        raise ProvenanceError(f"Missing or unreadable provenance file: {filepath}")
    if expected_hash is not None and record.get("config_hash") != expected_hash:
        raise ProvenanceError(
            f"{record.get('artifact', filepath)} was produced with config "
            f"{str(record.get('config_hash'))[:12]}, current config is {expected_hash[:12]}"
        )
    return record


# ─── Text Files ──────────────────────────────────────────────────────────────

def read_lines(filepath: str | Path, skip_blank: bool = True) -> List[str]:
    """Read a UTF-8 text file as a list of lines without trailing newlines"""
    with open(filepath, 'r', encoding='utf-8') as f:
        lines = [line.rstrip('\r\n') for line in f]
    if skip_blank:
        lines = [line for line in lines if line.strip()]
    return lines


def percentage(part: float, whole: float, default: Optional[float] = 0.0) -> Optional[float]:
    """part / whole as a percentage; default when whole is zero"""
    if whole == 0:
        return default
    return 100.0 * part / whole
