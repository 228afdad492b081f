# Evaluation metrics on a scored cohort.
#
# Balanced accuracy splits evenly across classes no matter how imbalanced
# the cohort is, AUC is threshold-free, and the robustness numbers are
# balanced accuracy restricted to a perturbation tag.

import numpy as np

from hedgekit import Label, LabeledScore, compute_report, focal_loss, jpeg_robustness

rng = np.random.default_rng(0)

# A deliberately imbalanced cohort: 50 real, 400 fake, with a weaker
# perturbed variant of every sample.
rows = []
for i in range(450):
    label = Label.REAL if i < 50 else Label.FAKE
    center = 0.2 if label is Label.REAL else 0.8
    rows.append(
        LabeledScore(f"s{i}", float(np.clip(rng.normal(center, 0.15), 0, 1)), label)
    )
    rows.append(
        LabeledScore(
            f"s{i}",
            float(np.clip(rng.normal(center, 0.28), 0, 1)),
            label,
            perturbation="jpeg_qf90",
        )
    )

report = compute_report(rows)
print("overall:")
print(f"  b_acc {report.b_acc:.4f} (r_acc {report.r_acc:.4f}, f_acc {report.f_acc:.4f})")
print(f"  f1    {report.f1:.4f}")
print(f"  auc   {report.auc:.4f}")
print(f"  n     {report.n_real} real / {report.n_fake} fake")

print()
print("per perturbation tag:")
for tag, sub in report.per_perturbation.items():
    print(f"  {tag:10s} b_acc {sub.b_acc:.4f}  auc {sub.auc:.4f}")
print(f"JPEG robustness (tag jpeg_qf90): {jpeg_robustness(rows):.4f}")

print()
print("focal loss down-weights what is already solved (gamma = 2):")
for p_true in (0.55, 0.7, 0.9, 0.99):
    plain_ce = focal_loss(p_true, Label.FAKE, gamma=0.0)
    focal = focal_loss(p_true, Label.FAKE, gamma=2.0)
    print(
        f"  p_true={p_true:.2f}: cross-entropy {plain_ce:.4f} -> focal {focal:.4f}"
        f"  (x{focal / plain_ce:.3f})"
    )
