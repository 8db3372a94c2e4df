"""
Data Loader Module
Reads and writes adjacency tensors in the TNS3 coordinate format, label sidecars and
embedding tables, and validates tensors against the bundled dataset descriptors.

TNS3 format:
    line 1      TNS3 <n1> <n2> <n3>
    then        <i> <j> <k> <value>     (0-based indices, whitespace separated)
    '#' starts a comment line; unspecified entries are zero.
"""

import logging
import os
import tempfile
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd

from src.errors import ArgumentError, DatasetValidationError, TensorIOError, TensorParseError
from src.tensor_core import as_tensor3

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]

TNS_MAGIC = 'TNS3'
NODE_LABEL_SUFFIX = '.nodes.txt'
LAYER_LABEL_SUFFIX = '.layers.txt'


@dataclass(frozen=True)
class DatasetDescriptor:
    """A real multilayer network the loader knows the shape of."""
    name: str
    dims: Tuple[int, int, int]
    provenance: str
    path: Optional[str] = None

    def __post_init__(self):
        if len(self.dims) != 3 or min(self.dims) < 1:
            raise ArgumentError(f"Dataset dims must be three positive integers, got {self.dims}")


DATASETS = {
    'malaria': DatasetDescriptor(
        name='malaria',
        dims=(212, 212, 9),
        provenance='Human malaria parasite var gene network: 212 genes over 9 highly '
                   'variable regions',
    ),
    'food-trade': DatasetDescriptor(
        name='food-trade',
        dims=(99, 99, 30),
        provenance='Worldwide food trading network (FAO): 99 countries, 30 food products',
    ),
    'un-commodity': DatasetDescriptor(
        name='un-commodity',
        dims=(48, 48, 97),
        provenance='UN Comtrade 2019: 48 top exporting countries, 97 commodity categories',
    ),
}


def dataset_descriptors() -> List[DatasetDescriptor]:
    """Descriptors of the three reference datasets (data files are not bundled)."""
    return list(DATASETS.values())


def get_dataset(name: str) -> DatasetDescriptor:
    try:
        return DATASETS[name]
    except KeyError:
        known = ', '.join(DATASETS)
        raise ArgumentError(f"Unknown dataset '{name}', expected one of: {known}")


def validate_dataset_dims(name: str, dims: Sequence[int]) -> DatasetDescriptor:
    """Raise DatasetValidationError when ``dims`` differ from the dataset's declared shape."""
    descriptor = get_dataset(name)
    if tuple(dims) != descriptor.dims:
        raise DatasetValidationError(name, descriptor.dims, tuple(dims))
    return descriptor


def atomic_write_text(path: PathLike, text: str) -> Path:
    """Write ``text`` with LF line endings via a temp file renamed into place."""
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        fd, tmp_name = tempfile.mkstemp(prefix=f".{path.name}.", dir=str(path.parent))
        try:
            with os.fdopen(fd, 'w', encoding='utf-8', newline='\n') as handle:
                handle.write(text)
            os.replace(tmp_name, path)
        except BaseException:
            if os.path.exists(tmp_name):
                os.unlink(tmp_name)
            raise
    except OSError as e:
        raise TensorIOError(f"Cannot write {path}: {e}") from e
    return path


def _read_lines(path: PathLike) -> List[str]:
    path = Path(path)
    if not path.exists():
        raise TensorIOError(f"File not found: {path}")
    try:
        return path.read_text(encoding='utf-8').splitlines()
    except (OSError, UnicodeDecodeError) as e:
        raise TensorIOError(f"Cannot read {path}: {e}") from e


def _format_value(value: float) -> str:
    if float(value).is_integer() and abs(value) < 2 ** 53:
        return str(int(value))
    return repr(float(value))


def _parse_header(tokens: List[str], line_number: int, path: str) -> Tuple[int, int, int]:
    if len(tokens) != 4 or tokens[0] != TNS_MAGIC:
        raise TensorParseError(f"Expected header '{TNS_MAGIC} <n1> <n2> <n3>'", line_number, path)
    try:
        dims = tuple(int(t) for t in tokens[1:])
    except ValueError:
        raise TensorParseError("Header dims must be integers", line_number, path)
    if min(dims) < 1:
        raise TensorParseError(f"Header dims must be positive, got {dims}", line_number, path)
    return dims


def read_tns(path: PathLike) -> Tuple[np.ndarray, Dict[str, Any]]:
    """
    Read a TNS3 coordinate file into a dense tensor.

    Duplicate coordinates keep the last value; their count is reported in the metadata.

    Args:
        path: File to read

    Returns:
        Tuple of (tensor, metadata)
    """
    path_str = str(path)
    tensor = None
    duplicates = 0
    seen = set()

    for line_number, raw in enumerate(_read_lines(path), start=1):
        line = raw.strip()
        if not line or line.startswith('#'):
            continue
        tokens = line.split()

        if tensor is None:
            dims = _parse_header(tokens, line_number, path_str)
            tensor = np.zeros(dims)
            continue

        if len(tokens) != 4:
            raise TensorParseError(
                f"Expected '<i> <j> <k> <value>', got {len(tokens)} fields", line_number, path_str
            )
        try:
            index = tuple(int(t) for t in tokens[:3])
        except ValueError:
            raise TensorParseError("Indices must be integers", line_number, path_str)
        try:
            value = float(tokens[3])
        except ValueError:
            raise TensorParseError(f"Non-numeric value '{tokens[3]}'", line_number, path_str)
        if not np.isfinite(value):
            raise TensorParseError(f"Non-finite value '{tokens[3]}'", line_number, path_str)
        if any(not 0 <= i < n for i, n in zip(index, tensor.shape)):
            raise TensorParseError(
                f"Index {index} out of range for dims {tensor.shape}", line_number, path_str
            )

        if index in seen:
            duplicates += 1
        seen.add(index)
        tensor[index] = value

    if tensor is None:
        raise TensorParseError("Missing header", None, path_str)

    if duplicates:
        logger.warning(f"{Path(path).name}: {duplicates} duplicate coordinates, last value kept")

    metadata = {
        'file_name': Path(path).name,
        'dims': list(tensor.shape),
        'nonzeros': int(np.count_nonzero(tensor)),
        'duplicates': duplicates,
    }
    logger.info(f"Loaded {tensor.shape} tensor from {Path(path).name} ({metadata['nonzeros']:,} nonzeros)")
    return tensor, metadata


def format_tns(t: np.ndarray) -> str:
    """TNS3 text for a tensor, nonzero entries in (k, j, i) lexicographic order."""
    t = as_tensor3(t)
    n1, n2, _ = t.shape
    lines = [f"{TNS_MAGIC} {t.shape[0]} {t.shape[1]} {t.shape[2]}"]
    flat = t.ravel(order='F')
    # Fortran-order positions enumerate (k, j, i) lexicographically
    for position in np.flatnonzero(flat):
        i = position % n1
        j = (position // n1) % n2
        k = position // (n1 * n2)
        lines.append(f"{i} {j} {k} {_format_value(flat[position])}")
    return '\n'.join(lines) + '\n'


def write_tns(t: np.ndarray, path: PathLike) -> Path:
    """Write a tensor as a TNS3 file; identical tensors give identical bytes."""
    return atomic_write_text(path, format_tns(t))


def sidecar_path(tensor_path: PathLike, suffix: str) -> Path:
    """``out.tns`` -> ``out<suffix>``."""
    tensor_path = Path(tensor_path)
    stem = tensor_path.name[:-len(tensor_path.suffix)] if tensor_path.suffix else tensor_path.name
    return tensor_path.with_name(stem + suffix)


def write_labels(labels, path: PathLike) -> Path:
    """
    One line per item. A 2-D array writes one whitespace-separated row per item
    (node labels under several network types).
    """
    labels = np.asarray(labels, dtype=int)
    if labels.ndim == 1:
        lines = [str(v) for v in labels]
    else:
        lines = [' '.join(str(v) for v in row) for row in labels]
    return atomic_write_text(path, '\n'.join(lines) + '\n')


def read_labels(path: PathLike, column: int = 0) -> np.ndarray:
    """Read one integer label per line, taking the given whitespace-separated column."""
    labels = []
    for line_number, raw in enumerate(_read_lines(path), start=1):
        line = raw.strip()
        if not line or line.startswith('#'):
            continue
        tokens = line.split()
        if column >= len(tokens):
            raise TensorParseError(f"No label column {column}", line_number, str(path))
        try:
            labels.append(int(tokens[column]))
        except ValueError:
            raise TensorParseError(f"Non-integer label '{tokens[column]}'", line_number, str(path))
    return np.asarray(labels, dtype=int)


def embedding_frame(embedding: np.ndarray) -> pd.DataFrame:
    embedding = np.atleast_2d(np.asarray(embedding, dtype=float))
    return pd.DataFrame(embedding, columns=[f"dim{i}" for i in range(embedding.shape[1])])


def write_embedding_csv(embedding: np.ndarray, path: PathLike) -> Path:
    """Header ``dim0,dim1,...`` then one row per item."""
    text = embedding_frame(embedding).to_csv(index=False, lineterminator='\n')
    return atomic_write_text(path, text)


def read_embedding_csv(path: PathLike) -> np.ndarray:
    path = Path(path)
    if not path.exists():
        raise TensorIOError(f"File not found: {path}")
    try:
        frame = pd.read_csv(path, float_precision='round_trip')
    except (pd.errors.ParserError, pd.errors.EmptyDataError, UnicodeDecodeError) as e:
        raise TensorParseError(f"Cannot parse embedding CSV: {e}", None, str(path))
    try:
        return frame.to_numpy(dtype=float)
    except ValueError as e:
        raise TensorParseError(f"Embedding CSV has non-numeric entries: {e}", None, str(path))


def write_cluster_csv(labels: np.ndarray, path: PathLike) -> Path:
    """``item,label`` rows."""
    labels = np.asarray(labels, dtype=int)
    frame = pd.DataFrame({'item': np.arange(labels.size), 'label': labels})
    return atomic_write_text(path, frame.to_csv(index=False, lineterminator='\n'))


def read_cluster_csv(path: PathLike) -> np.ndarray:
    path = Path(path)
    if not path.exists():
        raise TensorIOError(f"File not found: {path}")
    frame = pd.read_csv(path)
    if 'label' not in frame.columns:
        raise TensorParseError("Cluster CSV needs a 'label' column", None, str(path))
    return frame['label'].to_numpy(dtype=int)


def binarize(t: np.ndarray, threshold: float) -> np.ndarray:
    """Entries strictly above ``threshold`` become 1, all others 0."""
    return (as_tensor3(t) > threshold).astype(float)


def describe_tensor(t: np.ndarray) -> Dict[str, Any]:
    """Shape and structure summary of an adjacency tensor."""
    t = as_tensor3(t)
    n1, n2, L = t.shape
    square = n1 == n2
    summary = {
        'dims': [n1, n2, L],
        'nonzeros': int(np.count_nonzero(t)),
        'density': round(float(np.count_nonzero(t)) / t.size, 6),
        'binary': bool(np.isin(t, (0.0, 1.0)).all()),
        'nonnegative': bool((t >= 0).all()),
        'symmetric_layers': bool(square and np.array_equal(t, t.transpose(1, 0, 2))),
        'zero_diagonal': bool(square and not t[np.arange(n1), np.arange(n1), :].any()),
    }
    summary['mean_degree'] = round(float(t.sum()) / (n1 * L), 4) if square else None
    return summary


class TensorLoader:
    """Loads adjacency tensors and applies dataset validation and binarization."""

    def __init__(self, binarize_threshold: Optional[float] = None):
        """
        Initialize the loader.

        Args:
            binarize_threshold: When set, entries above it become 1 and the rest 0
        """
        self.binarize_threshold = binarize_threshold

    def load_file(self, file_path: PathLike,
                  dataset: Optional[str] = None) -> Tuple[np.ndarray, Dict[str, Any]]:
        """
        Load a TNS3 file.

        Args:
            file_path: Path to the tensor file
            dataset: Declared dataset name whose dims must match

        Returns:
            Tuple of (tensor, metadata)
        """
        tensor, metadata = read_tns(file_path)

        if dataset is not None:
            descriptor = validate_dataset_dims(dataset, tensor.shape)
            metadata['dataset'] = descriptor.name

        if self.binarize_threshold is not None:
            tensor = binarize(tensor, self.binarize_threshold)
            metadata['binarized_at'] = self.binarize_threshold

        metadata.update(describe_tensor(tensor))
        return tensor, metadata
