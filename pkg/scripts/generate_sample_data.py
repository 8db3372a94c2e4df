"""
Sample Data Generator
Creates small planted multilayer networks for trying out the CLI.
"""

import os
import sys

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from src.data_loader import (  # noqa: E402
    LAYER_LABEL_SUFFIX,
    NODE_LABEL_SUFFIX,
    sidecar_path,
    write_embedding_csv,
    write_labels,
    write_tns,
)
from src.generate import MmlsmParams, MmsbmParams, generate_mmlsm, generate_mmsbm  # noqa: E402

OUTPUT_DIR = 'sample_data'


def generate_mmsbm_sample(path: str) -> None:
    """Two network types with two communities each, as in the recovery benchmark."""
    gen = generate_mmsbm(MmsbmParams(n=100, m=2, L=12, K=2, d=25, r=0.3, seed=1))
    write_tns(gen.tensor, path)
    write_labels(gen.truth.layer_types, sidecar_path(path, LAYER_LABEL_SUFFIX))
    write_labels(gen.truth.memberships.T, sidecar_path(path, NODE_LABEL_SUFFIX))
    print(f"  Created: {path} {gen.tensor.shape}")


def generate_mmlsm_sample(path: str) -> None:
    gen = generate_mmlsm(MmlsmParams(n=50, m=2, L=10, rank=2, seed=3))
    write_tns(gen.tensor, path)
    write_labels(gen.truth.layer_types, sidecar_path(path, LAYER_LABEL_SUFFIX))
    write_embedding_csv(gen.truth.U, sidecar_path(path, '.U.csv'))
    write_embedding_csv(gen.truth.W, sidecar_path(path, '.W.csv'))
    write_tns(gen.truth.C, sidecar_path(path, '.core.tns'))
    print(f"  Created: {path} {gen.tensor.shape}")


def generate_malaria_shaped_sample(path: str) -> None:
    """Synthetic stand-in with the malaria dataset's shape, for --dataset malaria."""
    gen = generate_mmsbm(MmsbmParams(n=212, m=3, L=9, K=2, d=10, seed=5))
    write_tns(gen.tensor, path)
    write_labels(gen.truth.layer_types, sidecar_path(path, LAYER_LABEL_SUFFIX))
    print(f"  Created: {path} {gen.tensor.shape}")


def main():
    """Generate all sample data files."""
    os.makedirs(OUTPUT_DIR, exist_ok=True)

    print("Generating MMSBM network...")
    generate_mmsbm_sample(os.path.join(OUTPUT_DIR, 'mmsbm.tns'))

    print("Generating MMLSM network...")
    generate_mmlsm_sample(os.path.join(OUTPUT_DIR, 'mmlsm.tns'))

    print("Generating malaria-shaped network...")
    generate_malaria_shaped_sample(os.path.join(OUTPUT_DIR, 'malaria_shaped.tns'))

    print(f"\nDone! Sample data files created in {OUTPUT_DIR}/ directory.")


if __name__ == '__main__':
    main()
