# The dual-gating decision pipeline, traced step by step.
#
# Gate-1 drops the high-resolution branch when a jury quorum opposes it;
# gate-2 shifts the fused logit toward the two structurally distinct
# witnesses when they confidently agree against it.

from hedgekit import (
    LogitRecord,
    ModelId,
    View,
    decide_traced,
    default_config,
)

M1, M2, M3, M4, M5 = ModelId


def records_for(evidence: dict, tta=(M3, M4)):
    """Build one sample's records from per-model directional evidence."""
    records = []
    for model, d in evidence.items():
        views = [View.ORIG, View.HFLIP] if model in tta else [View.ORIG]
        for view in views:
            records.append(
                LogitRecord(
                    sample_id="demo",
                    model_id=model,
                    view=view,
                    logit_real=-d / 2,
                    logit_fake=d / 2,
                )
            )
    return records


cfg = default_config()
print("config: quorum", cfg.gate1.quorum, "| tau1", cfg.gate2.tau1,
      "| tau2", cfg.gate2.tau2, "| delta", cfg.gate2.delta)


def show(title, evidence):
    prediction, trace = decide_traced(records_for(evidence), cfg)
    print()
    print(f"== {title} ==")
    print("  evidence:", {m.value: d for m, d in evidence.items()})
    print(f"  gate-1 fired: {trace.gate1_fired} "
          f"(agreeing jury: {sorted(m.value for m in trace.agreeing_jury)})")
    print(f"  fused logit before gate-2: {trace.pre_correction_d:+.4f}")
    print(f"  gate-2 fired: {trace.gate2_fired} "
          f"-> fused logit {trace.post_correction_d:+.4f}")
    print(f"  score {prediction.fake_score:.4f} -> {prediction.predicted_label.value}")


# An isolated high-resolution outlier: everyone says fake, M4 says real.
show("gate-1: outlier suppression", {M1: 2, M2: 3, M3: 1, M4: -5, M5: 4})

# Two heavyweight branches drag the fusion the wrong way while both
# witnesses are loudly confident in the other direction.  M3 abstains
# (zero evidence), so no jury quorum forms and only gate-2 engages.
show("gate-2: consensus correction", {M1: -10, M2: -10, M3: 0, M4: 9, M5: 4})

# Both rules at once: gate-1 excludes M4 from the mix, then gate-2 still
# tests the original witness evidence against the re-fused logit.
show("overlap: both gates in pipeline order", {M1: 6, M2: 6, M3: 6, M4: -9, M5: -3.5})

# Quorum unmet: a 2-2 jury split protects M4 from exclusion.
show("no quorum, no exclusion", {M1: 2, M2: 3, M3: -1, M4: -5, M5: -4})
