"""Configuration settings for syncbase.

Values are resolved, lowest precedence first, from field defaults, a flat
`key = value` config file, `SB_*` environment variables (or `.env`), and
finally keyword arguments (the command-line flags).
"""

from collections.abc import Callable, Iterator
from contextlib import contextmanager
from contextvars import ContextVar
from pathlib import Path
from typing import Any, Self, TypeVar

from pydantic import Field, ValidationError
from pydantic.fields import FieldInfo
from pydantic_settings import (
    BaseSettings,
    PydanticBaseSettingsSource,
    SettingsConfigDict,
)

from syncbase.choices import Loss, LossChoice, Profile, ProfileChoice
from syncbase.errors import ConfigError
from syncbase.types.annotated import Count, LearningRate, PowerOfTwo, Uint64

T = TypeVar("T")

_config_file: ContextVar[Path | None] = ContextVar("config_file", default=None)


def parse_config_file(path: Path) -> dict[str, str]:
    """Parse a flat `key = value` file.

    Blank lines and lines starting with '#' are ignored. Keys are
    case-insensitive and may use '-' for '_'.

    Args:
        path (Path): The config file.

    Raises:
        ConfigError: If the file is missing or a line has no '='.

    Returns:
        dict[str, str]: The raw values.
    """
    try:
        text = path.read_text()
    except FileNotFoundError as e:
        raise ConfigError(f"No config file at {path}.") from e
    values = {}
    for number, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ConfigError(f"{path}:{number}: expected 'key = value'.")
        values[key.strip().lower().replace("-", "_")] = value.strip()
    return values


class KeyValueFileSource(PydanticBaseSettingsSource):
    """Settings source reading the config file of the current `load_settings` call."""

    def get_field_value(self, field: FieldInfo, field_name: str) -> tuple[Any, str, bool]:
        """Unused; values are returned all at once from `__call__`."""
        return None, field_name, False

    def __call__(self) -> dict[str, Any]:
        """The config file's values, or nothing if no file was given.

        Raises:
            ConfigError: If the file names an unknown setting.
        """
        path = _config_file.get()
        if path is None:
            return {}
        values = parse_config_file(path)
        unknown = sorted(set(values) - set(self.settings_cls.model_fields))
        if unknown:
            raise ConfigError(f"{path}: unknown setting(s) {', '.join(unknown)}.")
        return values


class Settings(BaseSettings):
    """Pydantic model for syncbase settings."""

    model_config = SettingsConfigDict(env_prefix="SB_", env_file=".env", env_file_encoding="utf-8", extra="ignore")

    seed: Uint64 = Field(description="Global seed for datasets and training.", default=0)
    threads: Count = Field(description="Upper bound on worker threads.", default=1)
    log_level: str = Field(description="Log level.", default="INFO")
    data_dir: Path = Field(description="Directory of dataset files.", default=Path("data"))
    model_dir: Path = Field(description="Directory of model files.", default=Path("models"))
    output_dir: Path = Field(description="Directory of sweep and report files.", default=Path("results"))
    n_fft: PowerOfTwo = Field(description="FFT size of the expert CFO estimator.", default=2**17)
    batch_size: Count = Field(description="Training batch size.", default=256)
    epochs: Count = Field(description="Training epochs.", default=100)
    lr_init: LearningRate = Field(description="Initial learning rate.", default=1e-3)
    loss: LossChoice = Field(description="Training loss.", default=Loss.MSE)
    profile: ProfileChoice = Field(description="Dataset size profile.", default=Profile.DESK)

    @classmethod
    def settings_customise_sources(
        cls,
        settings_cls: type[BaseSettings],
        init_settings: PydanticBaseSettingsSource,
        env_settings: PydanticBaseSettingsSource,
        dotenv_settings: PydanticBaseSettingsSource,
        file_secret_settings: PydanticBaseSettingsSource,
    ) -> tuple[PydanticBaseSettingsSource, ...]:
        """Insert the config file below the environment."""
        return (init_settings, env_settings, dotenv_settings, KeyValueFileSource(settings_cls))

    def __or__(self, f: Callable[[Self], T]) -> T:
        """Operator overloading to pipe settings into a function or other callable.

        Args:
            f (Callable[[Self], T]): The function that takes `settings` as an argument.

        Returns:
            T: The type returned by the function.
        """
        return f(self)


@contextmanager
def _using_config_file(path: Path | None) -> Iterator[None]:
    token = _config_file.set(path)
    try:
        yield
    finally:
        _config_file.reset(token)


def load_settings(config_file: Path | None = None, **overrides: Any) -> Settings:
    """Resolve settings from every source.

    Args:
        config_file (Path | None, optional): A `key = value` config file. Defaults to None.
        **overrides: Values that take precedence over every other source; None values are ignored.

    Raises:
        ConfigError: If any source holds an invalid value.

    Returns:
        Settings: The resolved settings.
    """
    with _using_config_file(config_file):
        try:
            return Settings(**{k: v for k, v in overrides.items() if v is not None})
        except ValidationError as e:
            raise ConfigError(str(e)) from e
