# Weight hierarchy and fusion strategies.
#
# Shows how the three-level ratio tree resolves into per-model weights and
# why the ensemble fuses logits instead of probabilities: softmax saturates
# confident branches, so probability averaging washes out disagreement that
# logit-space fusion preserves.

from hedgekit import (
    ModelId,
    ModelOutput,
    WeightHierarchy,
    derive_weights,
    fuse_prob_average,
    fuse_weighted_logit,
)

print("== hierarchical weight derivation ==")
hierarchy = WeightHierarchy()  # published defaults
weights = derive_weights(hierarchy)
for model, weight in sorted(weights.items()):
    print(f"  {model.value}: {weight:.4f}")
print(f"  sum = {sum(weights.values()):.12f}")

print()
print("ratios only need relative magnitudes, so (70, 30) equals (7, 3):")
scaled = derive_weights(WeightHierarchy(route_a_vs_b=(70, 30)))
print("  identical:", scaled == weights)

print()
print("== logit fusion vs probability averaging ==")
# Two branches in violent disagreement, both saturated.
outputs = [
    ModelOutput(ModelId.M1, 0.0, 20.0),   # shouts fake
    ModelOutput(ModelId.M2, 20.0, 0.0),   # shouts real
]
two_weights = {ModelId.M1: 0.7, ModelId.M2: 0.3}

averaged = fuse_prob_average(outputs, two_weights)
fused = fuse_weighted_logit(outputs, two_weights)
print(f"  probability averaging : score = {averaged:.4f}")
print(f"  weighted logit fusion : score = {fused.fake_score:.5f}")
print()
print("Probability averaging lands at ~0.70 because each branch saturates")
print("to ~1 or ~0 before mixing; the logit mix keeps the 0.7*20 - 0.3*20 = 8")
print("logit margin and stays decisive. The dynamic range survives fusion.")
