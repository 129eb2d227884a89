"""
Label noise and module ablations
================================

Flip a fraction of the labels, then compare the attention granulator with
and without orphan removal, and against the k-means baseline.
"""

from dataclasses import replace
from pathlib import Path

from gbgpp import GranulationConfig, Rule, cross_validate, inject_label_noise, load_dataset

DATA = Path(__file__).resolve().parents[1] / "data"
data = load_dataset(DATA / "banana.csv")
base = GranulationConfig()

print("rate   gbg++   no-orphan-removal   kmeans")
for rate in (0.1, 0.2, 0.3, 0.4):
    noisy = inject_label_noise(data, rate, seed=1)
    on = cross_validate(noisy, base, folds=5).mean_accuracy
    off = cross_validate(noisy, replace(base, enable_outlier_detection=False), folds=5).mean_accuracy
    km = cross_validate(noisy, GranulationConfig(method="kmeans"), Rule.SURFACE, folds=5).mean_accuracy
    print(f"{rate:4.1f}   {on:.3f}   {off:.3f}               {km:.3f}")

sonar = load_dataset(DATA / "sonar.csv")
with_am = cross_validate(sonar, base).mean_accuracy
without = cross_validate(sonar, replace(base, enable_am=False)).mean_accuracy
print(f"sonar: attention on {with_am:.3f}, off {without:.3f}")
