import json
import logging
from pathlib import Path
from typing import Any, Dict, Optional, Union

from omegaconf import OmegaConf

from qbirdpe.models.run import RunConfig

logger = logging.getLogger(__name__)


def load_config(
    path: Union[str, Path],
    seed: Optional[int] = None,
    shots: Optional[int] = None,
    qubit_cap: Optional[int] = None,
) -> RunConfig:
    """
    Loads a run configuration from YAML, or from the config snapshot of a manifest.

    Parameters:
    - path (str or Path): YAML config, or a manifest_*.json written by a run.
    - seed (int): Overrides every seed in the file.
    - shots (int): Switches qBIRD to shot measurement with this many shots.
    - qubit_cap (int): Overrides the simulator qubit cap.

    Returns:
    - RunConfig: The validated configuration.
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Config file {path} does not exist.")
    if path.suffix == ".json":
        manifest = json.loads(path.read_text())
        if "config" not in manifest:
            raise ValueError(f"{path}: manifest has no config snapshot.")
        raw = OmegaConf.create(manifest["config"])
    else:
        raw = OmegaConf.load(path)
    data: Dict[str, Any] = OmegaConf.to_container(raw, resolve=True)

    overrides = []
    if seed is not None:
        overrides.append(
            OmegaConf.from_dotlist(
                [f"sampler.seed={seed}", f"mh.seed={seed}", f"noise.seed={seed}"]
            )
        )
    if shots is not None:
        overrides.append(
            OmegaConf.from_dotlist(["sampler.measurement=shots", f"sampler.shots={shots}"])
        )
    if qubit_cap is not None:
        overrides.append(OmegaConf.from_dotlist([f"sampler.qubit_cap={qubit_cap}"]))
    if overrides:
        data = OmegaConf.to_container(OmegaConf.merge(data, *overrides), resolve=True)

    config = RunConfig.model_validate(data)
    logger.debug("Loaded config %s", path)
    return config


def snapshot(config: RunConfig) -> Dict[str, Any]:
    """
    JSON-ready form of the configuration that load_config parses back unchanged.
    """
    return config.model_dump(mode="json")


def save_config(config: RunConfig, path: Union[str, Path]) -> Path:
    path = Path(path)
    OmegaConf.save(OmegaConf.create(snapshot(config)), path)
    return path
