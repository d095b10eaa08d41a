#include "dlo/flex/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>

#include <nlohmann/json.hpp>

#include "dlo/sim/step.hpp"

namespace dlo::flex {

using json = nlohmann::json;

std::string to_string(Split s) {
  switch (s) {
    case Split::train: return "train";
    case Split::val: return "val";
    default: return "test";
  }
}

Split split_from_string(const std::string& s) {
  if (s == "train") return Split::train;
  if (s == "val") return Split::val;
  if (s == "test") return Split::test;
  throw ValidationError("unknown split tag: " + s);
}

namespace {

// Rope held by a two-particle grip (grasp + one aux pin) so the local
// tangent at the grip stays horizontal even for fully floppy material.
sim::RopeState rigged_rope(const sim::RopeParams& params, int grasp) {
  const Vec3 dir(-1, 0, 0);  // projected x then grows with particle index
  const double h = params.rest_len;
  const Vec3 base = -dir * (h * grasp);
  sim::RopeState rope = sim::init_rope(params, base, dir);
  rope.grasped_index = grasp;
  rope.grasp_target = Vec3::Zero();
  rope.aux_pins.push_back({grasp + 1, dir * h});
  return rope;
}

RigResult run_rig(double s, int n, int grasp, int first, int last, const RigConfig& rig) {
  const sim::RopeParams params = sim::flex_sweep_to_params(s, n);
  sim::World world;
  world.floor = false;  // rig hangs the rope in free space
  const sim::SettleResult settled = sim::settle_quasi_static(
      rigged_rope(params, grasp), params, world, rig.max_settle_steps, rig.vel_tol);

  std::vector<Vec3> window;
  std::vector<int> indices;
  for (int i = first; i < last; ++i) {
    window.push_back(settled.state.positions[i]);
    indices.push_back(i);
  }
  RigResult res;
  res.curve = project_to_gripper_plane(window, indices, rig.plane_normal);
  res.converged = settled.converged;
  res.grasp_proj = project_point(settled.state.positions[grasp], rig.plane_normal);
  return res;
}

}  // namespace

RigResult run_label_rig(double s, const RigConfig& rig) {
  return run_rig(s, rig.label_n, rig.label_grasp, 0, rig.label_n, rig);
}

double label_flexibility(double s, const RigConfig& rig) {
  const RigResult r = run_label_rig(s, rig);
  return compute_flexibility(r.curve, rig.label_grasp);
}

RigResult run_input_rig(double s, const RigConfig& rig) {
  return run_rig(s, rig.input_n, rig.input_grasp, rig.input_first, rig.input_n, rig);
}

std::string sim_params_hash(const RigConfig& rig) {
  const sim::RopeParams lo = sim::flex_sweep_to_params(0.0, rig.label_n);
  const sim::RopeParams hi = sim::flex_sweep_to_params(1.0, rig.label_n);
  char buf[256];
  std::snprintf(buf, sizeof(buf), "%d %d %d %d %d %.9g %.9g %.9g %.9g %d %d %.9g %.9g %.9g",
                rig.label_n, rig.label_grasp, rig.input_n, rig.input_grasp, rig.input_first,
                lo.rest_len, lo.particle_mass, lo.damping, lo.dt, lo.solver_iters,
                hi.solver_iters, rig.plane_normal.x(), rig.plane_normal.y(), rig.vel_tol);
  std::snprintf(buf + std::strlen(buf), sizeof(buf) - std::strlen(buf), " %d", rig.max_settle_steps);
  char out[32];
  std::snprintf(out, sizeof(out), "%016llx",
                static_cast<unsigned long long>(fnv1a64(buf)));
  return out;
}

ProjectedCurve augment_sample(const ProjectedCurve& curve, Rng& rng, const AugmentParams& params) {
  const double lambda = rng.uniform(params.lambda_lo, params.lambda_hi);
  ProjectedCurve out = curve;
  for (Vec2& p : out.points) {
    p.x() = lambda * (p.x() + rng.normal(0.0, params.noise_std));
    p.y() = lambda * (p.y() + rng.normal(0.0, params.noise_std));
  }
  return out;
}

int FlexDataset::count(Split split, std::optional<bool> augmented) const {
  int c = 0;
  for (const FlexSample& s : samples)
    if (s.split == split && (!augmented || s.augmented == *augmented)) ++c;
  return c;
}

std::pair<double, double> FlexDataset::label_range() const {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (const FlexSample& s : samples) {
    if (s.augmented) continue;
    lo = std::min(lo, s.label_f);
    hi = std::max(hi, s.label_f);
  }
  if (!(lo <= hi)) throw ValidationError("label_range: no clean samples");
  return {lo, hi};
}

FlexDataset generate_flex_dataset(const std::vector<double>& sweep, int per_sweep_augments,
                                  std::uint64_t seed, const GenOptions& opts) {
  if (sweep.empty()) throw ValidationError("generate_flex_dataset: empty sweep");
  if (per_sweep_augments < 0)
    throw ValidationError("generate_flex_dataset: per_sweep_augments must be >= 0");

  const int n_val = opts.val_augments >= 0 ? opts.val_augments : per_sweep_augments / 10;
  const int n_test = opts.test_augments >= 0 ? opts.test_augments : per_sweep_augments / 10;

  FlexDataset ds;
  ds.meta.sweep = sweep;
  ds.meta.per_sweep_augments = per_sweep_augments;
  ds.meta.val_augments = n_val;
  ds.meta.test_augments = n_test;
  ds.meta.augment = opts.augment;
  ds.meta.rig = opts.rig;
  ds.meta.root_seed = seed;
  ds.meta.sim_params_hash = sim_params_hash(opts.rig);

  int skipped = 0;
  for (std::size_t idx = 0; idx < sweep.size(); ++idx) {
    const double s = sweep[idx];
    double f = 0.0;
    RigResult input;
    try {
      const RigResult label = run_label_rig(s, opts.rig);
      input = run_input_rig(s, opts.rig);
      if (!label.converged || !input.converged) {
        std::cerr << "warning: sweep " << s << " did not settle, skipping\n";
        ++skipped;
        continue;
      }
      f = compute_flexibility(label.curve, opts.rig.label_grasp);
    } catch (const DegenerateGeometry& e) {
      std::cerr << "warning: sweep " << s << " degenerate (" << e.what() << "), skipping\n";
      ++skipped;
      continue;
    }
    ds.meta.grasp_proj = input.grasp_proj;

    FlexSample clean;
    clean.curve = input.curve;
    clean.label_f = f;
    clean.sweep_param = s;
    clean.augmented = false;
    clean.split = Split::train;
    ds.samples.push_back(clean);

    auto emit_augments = [&](int count, Split split, const char* label_tag) {
      for (int j = 0; j < count; ++j) {
        const std::uint64_t sample_seed =
            Rng::stream_seed(seed, label_tag, idx * 1000003ULL + static_cast<std::uint64_t>(j));
        Rng rng(sample_seed);
        FlexSample aug;
        aug.curve = augment_sample(input.curve, rng, opts.augment);
        aug.label_f = f;
        aug.sweep_param = s;
        aug.augmented = true;
        aug.seed = sample_seed;
        aug.split = split;
        ds.samples.push_back(aug);
      }
    };
    emit_augments(per_sweep_augments, Split::train, "flex/augment/train");
    emit_augments(n_val, Split::val, "flex/augment/val");
    emit_augments(n_test, Split::test, "flex/augment/test");
  }

  ds.meta.skipped = skipped;
  if (static_cast<double>(skipped) > opts.max_skip_fraction * static_cast<double>(sweep.size()))
    throw std::runtime_error("generate_flex_dataset: too many skipped sweep values (" +
                             std::to_string(skipped) + "/" + std::to_string(sweep.size()) + ")");
  return ds;
}

const FlexSample& nearest_flex_match(double estimated_f, const FlexDataset& library) {
  const FlexSample* best = nullptr;
  for (const FlexSample& s : library.samples) {
    if (s.augmented || s.split != Split::train) continue;
    if (!best) {
      best = &s;
      continue;
    }
    const double d = std::abs(s.label_f - estimated_f);
    const double bd = std::abs(best->label_f - estimated_f);
    if (d < bd || (d == bd && s.label_f < best->label_f)) best = &s;
  }
  if (!best) throw ValidationError("nearest_flex_match: library has no clean train samples");
  return *best;
}

namespace {

json curve_points_json(const ProjectedCurve& c) {
  json pts = json::array();
  for (const Vec2& p : c.points) pts.push_back({p.x(), p.y()});
  return pts;
}

json rig_json(const RigConfig& r) {
  return json{{"label_n", r.label_n},
              {"label_grasp", r.label_grasp},
              {"input_n", r.input_n},
              {"input_grasp", r.input_grasp},
              {"input_first", r.input_first},
              {"plane_normal", {r.plane_normal.x(), r.plane_normal.y(), r.plane_normal.z()}},
              {"max_settle_steps", r.max_settle_steps},
              {"vel_tol", r.vel_tol}};
}

RigConfig rig_from_json(const json& j) {
  RigConfig r;
  r.label_n = j.at("label_n").get<int>();
  r.label_grasp = j.at("label_grasp").get<int>();
  r.input_n = j.at("input_n").get<int>();
  r.input_grasp = j.at("input_grasp").get<int>();
  r.input_first = j.at("input_first").get<int>();
  const auto& pn = j.at("plane_normal");
  r.plane_normal = Vec3(pn.at(0).get<double>(), pn.at(1).get<double>(), pn.at(2).get<double>());
  r.max_settle_steps = j.at("max_settle_steps").get<int>();
  r.vel_tol = j.at("vel_tol").get<double>();
  return r;
}

}  // namespace

void save_jsonl(const FlexDataset& ds, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open dataset file for writing: " + path);
  for (const FlexSample& s : ds.samples) {
    json line{{"sweep_param", s.sweep_param},
              {"label_f", s.label_f},
              {"points", curve_points_json(s.curve)},
              {"augmented", s.augmented},
              {"seed", s.seed},
              {"split", to_string(s.split)},
              {"source_indices", s.curve.source_indices}};
    out << line.dump() << "\n";
  }

  json meta{{"sweep", ds.meta.sweep},
            {"per_sweep_augments", ds.meta.per_sweep_augments},
            {"val_augments", ds.meta.val_augments},
            {"test_augments", ds.meta.test_augments},
            {"augment",
             {{"lambda_lo", ds.meta.augment.lambda_lo},
              {"lambda_hi", ds.meta.augment.lambda_hi},
              {"noise_std", ds.meta.augment.noise_std}}},
            {"rig", rig_json(ds.meta.rig)},
            {"root_seed", ds.meta.root_seed},
            {"sim_params_hash", ds.meta.sim_params_hash},
            {"grasp_proj", {ds.meta.grasp_proj.x(), ds.meta.grasp_proj.y()}},
            {"skipped", ds.meta.skipped}};
  std::ofstream mout(path + ".meta.json");
  if (!mout) throw std::runtime_error("cannot open dataset metadata for writing: " + path);
  mout << meta.dump(2) << "\n";
}

FlexDataset load_jsonl(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open dataset file: " + path);
  FlexDataset ds;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const json j = json::parse(line);
    FlexSample s;
    s.sweep_param = j.at("sweep_param").get<double>();
    s.label_f = j.at("label_f").get<double>();
    for (const auto& p : j.at("points"))
      s.curve.points.emplace_back(p.at(0).get<double>(), p.at(1).get<double>());
    s.curve.source_indices = j.at("source_indices").get<std::vector<int>>();
    s.augmented = j.at("augmented").get<bool>();
    s.seed = j.at("seed").get<std::uint64_t>();
    s.split = split_from_string(j.at("split").get<std::string>());
    ds.samples.push_back(std::move(s));
  }

  std::ifstream min(path + ".meta.json");
  if (!min) throw std::runtime_error("missing dataset metadata: " + path + ".meta.json");
  const json meta = json::parse(min);
  ds.meta.sweep = meta.at("sweep").get<std::vector<double>>();
  ds.meta.per_sweep_augments = meta.at("per_sweep_augments").get<int>();
  ds.meta.val_augments = meta.at("val_augments").get<int>();
  ds.meta.test_augments = meta.at("test_augments").get<int>();
  ds.meta.augment.lambda_lo = meta.at("augment").at("lambda_lo").get<double>();
  ds.meta.augment.lambda_hi = meta.at("augment").at("lambda_hi").get<double>();
  ds.meta.augment.noise_std = meta.at("augment").at("noise_std").get<double>();
  ds.meta.rig = rig_from_json(meta.at("rig"));
  ds.meta.root_seed = meta.at("root_seed").get<std::uint64_t>();
  ds.meta.sim_params_hash = meta.at("sim_params_hash").get<std::string>();
  ds.meta.grasp_proj = Vec2(meta.at("grasp_proj").at(0).get<double>(),
                            meta.at("grasp_proj").at(1).get<double>());
  ds.meta.skipped = meta.at("skipped").get<int>();

  if (ds.meta.sim_params_hash != sim_params_hash(ds.meta.rig))
    throw ValidationError("dataset simulator hash mismatch: " + path);
  return ds;
}

}  // namespace dlo::flex
