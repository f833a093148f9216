#pragma once

#include <string_view>
#include <vector>

#include "wellcheck/complex.hpp"

namespace wellcheck {

enum class FamilyKind { FullSupNorm, Shift, SampledParametric };

std::string_view to_string(FamilyKind kind);

/// A user-supplied perturbation with its declared sup-distance to f.
struct SampledPerturbation {
  ScalarField field;
  double distance = 0.0;
};

/// The admissible perturbation model together with its metric.
///   FullSupNorm: every continuous map, sup metric.
///   Shift: translations f + t with metric |t|.
///   SampledParametric: an explicit finite list of PL perturbations.
class PerturbationFamily {
 public:
  static PerturbationFamily full() { return PerturbationFamily(FamilyKind::FullSupNorm, {}); }
  static PerturbationFamily shift() { return PerturbationFamily(FamilyKind::Shift, {}); }
  static PerturbationFamily sampled(std::vector<SampledPerturbation> samples);

  FamilyKind kind() const { return kind_; }
  const std::vector<SampledPerturbation>& samples() const { return samples_; }

 private:
  PerturbationFamily(FamilyKind kind, std::vector<SampledPerturbation> samples)
      : kind_(kind), samples_(std::move(samples)) {}

  FamilyKind kind_;
  std::vector<SampledPerturbation> samples_;
};

}  // namespace wellcheck
