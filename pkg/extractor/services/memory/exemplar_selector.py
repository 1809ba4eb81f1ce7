# Путь: extractor/services/memory/exemplar_selector.py
# =================================================================================
# ОТБОР ЭКЗЕМПЛЯРОВ ДЛЯ ПАМЯТИ
#
#   Если экземпляров не больше m - берутся все. Иначе k-means с k = m
#   (инициализация - m различных точек, выбранных по seed; не более 100
#   итераций или сдвиг центроидов < 1e-6), и из каждого кластера берется
#   ближайший к центроиду экземпляр (евклидово расстояние, при равенстве -
#   меньший индекс).
# =================================================================================
from typing import List, Sequence, TypeVar

import numpy as np
from sklearn.cluster import KMeans

from extractor.utils.log import debug

T = TypeVar('T')

KMEANS_MAX_ITER = 100
KMEANS_TOL = 1e-6


def _distinct_rows(features: np.ndarray) -> np.ndarray:
    _, first = np.unique(features, axis=0, return_index=True)
    return np.sort(first)


def select_exemplars(instances: Sequence[T], features, m: int, seed: int = 0) -> List[T]:
    if len(instances) == 0:
        raise ValueError("нельзя выбрать экземпляры из пустого списка")
    features = np.asarray(features, dtype=np.float64)
    if features.shape[0] != len(instances):
        raise ValueError(f"признаков {features.shape[0]}, экземпляров {len(instances)}")
    if m <= 0:
        return []
    if len(instances) <= m:
        return list(instances)

    candidates = _distinct_rows(features)
    k = min(m, len(candidates))
    rng = np.random.default_rng(seed)
    init = features[np.sort(rng.choice(candidates, size=k, replace=False))]
    kmeans = KMeans(n_clusters=k, init=init, n_init=1, max_iter=KMEANS_MAX_ITER,
                    tol=KMEANS_TOL, random_state=seed)
    labels = kmeans.fit_predict(features)

    chosen = []
    for cluster in range(k):
        members = np.flatnonzero(labels == cluster)
        if len(members) == 0:
            continue
        distances = np.linalg.norm(features[members] - kmeans.cluster_centers_[cluster], axis=1)
        chosen.append(int(members[np.argmin(distances)]))
    chosen.sort()
    debug(f"[select_exemplars] {len(instances)} -> {len(chosen)} (k={k})")
    return [instances[i] for i in chosen]
