import pathlib

import yaml

from lorprod.space._base_space import BaseSpace


def load_space(path: str | pathlib.Path) -> BaseSpace:
    """Load a base space from a JSON (or YAML) graph document.

    Parameters
    ----------
    path : str | pathlib.Path
        File holding {"nodes": [...], "edges": [[u, v, len], ...]}.

    Returns
    -------
    BaseSpace
        The parsed space.
    """
    with pathlib.Path(path).open() as infile:
        data = yaml.safe_load(infile)
    return BaseSpace.from_dict(data)
