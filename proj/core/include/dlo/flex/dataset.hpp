#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dlo/flex/projection.hpp"
#include "dlo/rng.hpp"
#include "dlo/sim/rope.hpp"

namespace dlo::flex {

enum class Split { train, val, test };

std::string to_string(Split s);
Split split_from_string(const std::string& s);

/// One estimator training datum: a projected (possibly noise-augmented)
/// partial rope shape paired with the scalar flexibility label of the rope
/// that produced it.
struct FlexSample {
  ProjectedCurve curve;
  double label_f = 0.0;
  double sweep_param = 0.0;
  bool augmented = false;
  std::uint64_t seed = 0;  ///< augmentation stream seed; 0 for clean samples
  Split split = Split::train;
};

struct AugmentParams {
  double lambda_lo = 0.85;
  double lambda_hi = 1.0;
  double noise_std = 0.003;  ///< meters, per coordinate
};

/// Fixed one-interaction measurement protocol: hold the rope at a predefined
/// horizontal grip and let it settle under gravity, then project into the
/// grip plane. The label pass evaluates the flexibility at the grip of a
/// short rope grasped in the middle; the input pass records the far half of
/// a longer, asymmetrically grasped rope.
struct RigConfig {
  int label_n = 20;
  int label_grasp = 10;
  int input_n = 40;
  int input_grasp = 10;
  int input_first = 20;  ///< first particle of the recorded window (to n-1)
  Vec3 plane_normal = Vec3(0, 1, 0);
  int max_settle_steps = 2000;
  double vel_tol = 1e-3;
};

struct RigResult {
  ProjectedCurve curve;
  bool converged = false;
  Vec2 grasp_proj = Vec2::Zero();  ///< grip projection, for caller-side centering
};

/// Settle the label rope (short, mid-grasped) for sweep value s and project
/// all particles. compute_flexibility(curve, label_grasp) is the label.
RigResult run_label_rig(double s, const RigConfig& rig = {});

/// Convenience: label rig + flexibility at the grip index.
double label_flexibility(double s, const RigConfig& rig = {});

/// Settle the input rope (long, off-center grasp) and project the recorded
/// window [input_first, input_n).
RigResult run_input_rig(double s, const RigConfig& rig = {});

struct DatasetMetadata {
  std::vector<double> sweep;
  int per_sweep_augments = 0;
  int val_augments = 0;
  int test_augments = 0;
  AugmentParams augment;
  RigConfig rig;
  std::uint64_t root_seed = 0;
  std::string sim_params_hash;  ///< hash over rig + sweep mapping constants
  Vec2 grasp_proj = Vec2::Zero();
  int skipped = 0;
};

struct FlexDataset {
  std::vector<FlexSample> samples;
  DatasetMetadata meta;

  int count(Split split, std::optional<bool> augmented = std::nullopt) const;
  /// [min, max] of clean labels; used by the random-f evaluation mode.
  std::pair<double, double> label_range() const;
};

/// Hash of the simulator-facing generation constants; stored in metadata and
/// revalidated on load.
std::string sim_params_hash(const RigConfig& rig);

/// Noise-then-scale perturbation: adds iid Gaussian noise (std
/// params.noise_std) to every coordinate, then scales all points by one
/// lambda drawn uniformly from [lambda_lo, lambda_hi].
ProjectedCurve augment_sample(const ProjectedCurve& curve, Rng& rng,
                              const AugmentParams& params = {});

struct GenOptions {
  int val_augments = -1;   ///< -1: per_sweep_augments / 10
  int test_augments = -1;  ///< -1: per_sweep_augments / 10
  AugmentParams augment;
  RigConfig rig;
  double max_skip_fraction = 0.10;
};

/// Run the full collection protocol over the sweep values. Per value: one
/// clean train sample plus per_sweep_augments train augments and the
/// configured val/test augments, all sharing the clean label. Sweep values
/// whose settle fails to converge (or whose window degenerates) are skipped
/// with a warning; more than max_skip_fraction skips is an error.
FlexDataset generate_flex_dataset(const std::vector<double>& sweep, int per_sweep_augments,
                                  std::uint64_t seed, const GenOptions& opts = {});

/// The clean train sample whose label is nearest to estimated_f; ties go to
/// the smaller label.
const FlexSample& nearest_flex_match(double estimated_f, const FlexDataset& library);

/// JSON-lines persistence. save writes `path` (one sample per line) and a
/// `path + ".meta.json"` sidecar; load reads both and validates the
/// simulator hash.
void save_jsonl(const FlexDataset& ds, const std::string& path);
FlexDataset load_jsonl(const std::string& path);

}  // namespace dlo::flex
