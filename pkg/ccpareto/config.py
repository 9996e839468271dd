from pydantic_settings import BaseSettings, SettingsConfigDict

LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'

class Settings(BaseSettings):
    # Logging
    LOG_LEVEL: str = "INFO"

    # Filesystem
    DATA_DIR: str = "data"
    OUTPUT_DIR: str = "results"

    # Execution
    WORKERS: int = 1
    DEBUG_CHECKS: bool = False

    # API
    API_SECRET_KEY: str = ""
    MAX_API_TMAX: int = 200_000

    model_config = SettingsConfigDict(env_file=".env", env_prefix="CCP_", extra="ignore")

settings = Settings()
