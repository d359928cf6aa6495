from pydantic import ValidationError
from pydantic_settings import BaseSettings, SettingsConfigDict
from pathlib import Path
from typing import Optional

from app.services.errors import ConfigError

# Get the directory where this config.py file is located
BASE_DIR = Path(__file__).parent.parent  # Goes up from app/ to the repo root

class Settings(BaseSettings):
    # Precision
    precision_bits: int = 128
    guard_bits: int = 32
    tolerance: float = 1e-20

    # Sieve limits
    memory_cap: int = 100_000_000
    segment_size: int = 1 << 22

    # Output
    output_dir: str = "out"

    # Zero-free region (Korobov-Vinogradov shape)
    region_alpha: float = 2 / 3
    region_beta: float = 1 / 3
    region_b: float = 0.0203
    region_w: float = 16.0

    # Contour majorants
    nu: float = 2.0
    cd_safety: float = 2.0
    theta_min_deg: float = 5.0
    unsafe_tall_contour: bool = False
    quad_max_degree: int = 8

    bernoulli_cap: int = 256
    log_level: str = "WARNING"

    model_config = SettingsConfigDict(
        env_prefix="OGF_",
        env_file=BASE_DIR / ".env",
        extra="forbid",
    )

    def with_overrides(self, **overrides) -> "Settings":
        """Copy with non-None overrides applied (CLI flags win over the file)"""
        values = {k: v for k, v in overrides.items() if v is not None}
        return self.model_copy(update=values)


def parse_config_lines(text: str) -> dict[str, tuple[int, str]]:
    """
    Parse `key = value` lines. Returns {key: (line_number, raw_value)}.
    Unknown keys and malformed lines raise ConfigError with the line number.
    """
    known = set(Settings.model_fields)
    entries = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw.strip()!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in known:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in entries:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        entries[key] = (lineno, value)
    return entries


def load_run_config(path: Optional[Path] = None) -> Settings:
    """Build Settings from an optional RunConfig file on top of env/defaults"""
    if path is None:
        return Settings()

    try:
        text = Path(path).read_text()
    except OSError as e:
        raise ConfigError(f"cannot read config file {path}: {e}")

    entries = parse_config_lines(text)
    try:
        return Settings(**{key: value for key, (_, value) in entries.items()})
    except ValidationError as e:
        # Point at the first offending line
        first = e.errors()[0]
        key = first["loc"][0] if first["loc"] else None
        lineno = entries[key][0] if key in entries else 0
        raise ConfigError(f"line {lineno}: invalid value for {key!r}: {first['msg']}")


settings = Settings()


def activate(effective: Settings) -> Settings:
    """Copy `effective` onto the shared singleton the services read from"""
    for name in Settings.model_fields:
        setattr(settings, name, getattr(effective, name))
    return settings
