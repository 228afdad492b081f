# Synthetic failure-pattern experiment.
#
# Generates a labeled cohort that injects the two failure patterns the
# gates target, then compares plain weighted fusion against each gate and
# the full configuration — the desk-scale version of the ablation story.

import dataclasses

from hedgekit import Gate1Params, Gate2Params, balanced_accuracy, default_config
from hedgekit.harness import SynthSpec, labeled_scores, run_ensemble, synth_cohort

spec = SynthSpec(
    n_real=500,
    n_fake=500,
    outlier_rate=0.1,
    consensus_override_rate=0.1,
    noise_std=0.0,
    seed=42,
)
cohort = synth_cohort(spec)
print(f"cohort: {len(cohort.sample_keys)} samples, {len(cohort.records)} records")

groups = {}
for sample_id, tag in cohort.sample_keys:
    rec = cohort.sample_records(sample_id, tag)[0]
    groups[rec.group] = groups.get(rec.group, 0) + 1
print("construction mix:", dict(sorted(groups.items())))

base = default_config()
configs = {
    "plain weighted fusion": dataclasses.replace(
        base, gate1=Gate1Params(enabled=False), gate2=Gate2Params(enabled=False)
    ),
    "gate-1 only": dataclasses.replace(base, gate2=Gate2Params(enabled=False)),
    "gate-2 only": dataclasses.replace(base, gate1=Gate1Params(enabled=False)),
    "full (both gates)": base,
}

print()
print(f"{'configuration':24s}  overall   outlier  override")
for name, cfg in configs.items():
    results = run_ensemble(cohort, cfg)
    overall = balanced_accuracy(labeled_scores(results))[2]
    by_group = {}
    for group in ("outlier", "override"):
        subset = [r for r in results if r.group == group]
        by_group[group] = balanced_accuracy(labeled_scores(subset))[2]
    print(
        f"{name:24s}  {overall:.4f}    {by_group['outlier']:.4f}   "
        f"{by_group['override']:.4f}"
    )

print()
print("Each gate fixes exactly the subset it was designed for. On override")
print("samples the full pipeline pays for the overlap: the wrong-way staged")
print("majority also forms a quorum against M4, so gate-1 removes the")
print("strongest witness's weight before gate-2's fixed shift can recover.")
