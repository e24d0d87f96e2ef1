"""Manifest fixtures shaped like the published NIR and VIS iris corpora.

Sample ids are synthetic; only the (dataset, sensor, label, PAI) counts matter.
"""
from __future__ import annotations

from .manifest import SampleRecord

# (dataset, sensor, label, pai_category, count)
NIR_COMPOSITION = (
    ("CASIA-IrisV4", "IKEMB-100", "bonafide", "none", 20000),
    ("IIITD-CLI", "VistaFA2E / CIS 202", "bonafide", "none", 2134),
    ("LivDet13-Clarkson", "Dalsa", "bonafide", "none", 516),
    ("LivDet15-Clarkson", "LG IrisAccess EOU2200 / Dalsa", "bonafide", "none", 1906),
    ("LivDet17-Clarkson", "LG IrisAccess EOU2200", "bonafide", "none", 3954),
    ("LivDet17-Warsaw", "IrisGuard AD100", "bonafide", "none", 1844),
    ("NDCLD13", "LG4000 / IrisGuard AD100", "bonafide", "none", 1700),
    ("NDCLD15", "LG4000 / IrisGuard AD100", "bonafide", "none", 2475),
    ("Warsaw-Disease", "IrisGuard AD100", "bonafide", "none", 282),
    ("Synthetic-Iris", "LG2200", "bonafide", "none", 4129),
    ("Disease-Eyes", "MorphoTrust Mobile-Eyes", "attack", "diseased", 252),
    ("Warsaw-Disease", "IrisGuard AD100", "attack", "diseased", 1510),
    ("IIITD-CLI", "Vista Imaging FA2 / CIS 202", "attack", "textured_lens", 4241),
    ("LivDet13-Clarkson", "Dalsa", "attack", "textured_lens", 840),
    ("LivDet15-Clarkson", "LG IrisAccess EOU2200 / Dalsa", "attack", "textured_lens", 2547),
    ("LivDet17-Clarkson", "LG IrisAccess EOU2200", "attack", "textured_lens", 1887),
    ("NDCLD13", "LG4000 / IrisGuard AD100", "attack", "textured_lens", 3400),
    ("NDCLD15", "LG4000 / IrisGuard AD100", "attack", "textured_lens", 4825),
    ("LivDet15-Clarkson", "LG IrisAccess EOU2200 / Dalsa", "attack", "paper_print", 3492),
    ("LivDet17-Clarkson", "LG IrisAccess EOU2200", "attack", "paper_print", 2254),
    ("LivDet17-Warsaw", "IrisGuard AD100", "attack", "paper_print", 2669),
    ("CASIA-IrisV4", "Learning-based synthesis", "attack", "synthetic", 10000),
    ("Synthetic-Iris", "Learning-based synthesis", "attack", "synthetic", 4167),
)

VIS_COMPOSITION = (
    ("VSIA", "DSLR", "bonafide", "none", 5200),
    ("VSIA", "DSLR", "attack", "paper_print", 5200),
    ("VSIA", "DSLR", "attack", "display", 10400),
    ("VSIA", "DSLR", "attack", "print_display", 10400),
)

# held-out pairs used for the joint dataset x PAI protocol
JOINT_HOLDOUT_PAIRS = (
    ("CASIA-IrisV4", "synthetic"),
    ("LivDet17-Clarkson", "paper_print"),
    ("NDCLD15", "textured_lens"),
    ("Warsaw-Disease", "diseased"),
)


def _expand(composition, spectrum: str, scale: float) -> list[SampleRecord]:
    records = []
    for dataset, sensor, label, pai, count in composition:
        n = count if scale == 1 else max(1, round(count * scale))
        prefix = f"{dataset}/{label}/{pai}"
        records.extend(
            SampleRecord(f"{prefix}/{i:05d}", dataset, sensor, spectrum, label, pai)
            for i in range(n)
        )
    return records


def corpus_manifest(*, nir: bool = True, vis: bool = True, scale: float = 1.0) -> list[SampleRecord]:
    """Records reproducing the corpus counts; ``scale`` < 1 shrinks every cell."""
    records = []
    if nir:
        records += _expand(NIR_COMPOSITION, "NIR", scale)
    if vis:
        records += _expand(VIS_COMPOSITION, "VIS", scale)
    return records
