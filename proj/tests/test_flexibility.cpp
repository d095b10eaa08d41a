#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>

#include "dlo/flex/dataset.hpp"
#include "dlo/stats.hpp"

using namespace dlo;
using namespace dlo::flex;

namespace {

ProjectedCurve make_curve(const std::vector<Vec2>& pts) {
  ProjectedCurve c;
  c.points = pts;
  for (std::size_t i = 0; i < pts.size(); ++i) c.source_indices.push_back(static_cast<int>(i));
  return c;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

}  // namespace

TEST_SUITE("flexibility") {

TEST_CASE("projection matches the gripper frame definition") {
  const Vec2 a = project_point(Vec3(1, 2, 3), Vec3(1, 0, 0));
  CHECK(a.x() == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(a.y() == doctest::Approx(-3.0).epsilon(1e-14));

  const Vec2 b = project_point(Vec3(1, 2, 3), Vec3(0, 1, 0));
  CHECK(b.x() == doctest::Approx(-1.0).epsilon(1e-14));
  CHECK(b.y() == doctest::Approx(-3.0).epsilon(1e-14));

  const Vec2 o = project_point(Vec3::Zero(), Vec3(0.6, 0.8, 0));
  CHECK(o.x() == 0.0);
  CHECK(o.y() == 0.0);
}

TEST_CASE("projection rejects bad normals") {
  std::vector<Vec3> pts(4, Vec3::Zero());
  std::vector<int> idx{0, 1, 2, 3};
  CHECK_THROWS_AS(project_to_gripper_plane(pts, idx, Vec3(0, 0, 1)), ValidationError);
  CHECK_THROWS_AS(project_to_gripper_plane(pts, idx, Vec3(0, 2, 0)), ValidationError);
}

TEST_CASE("projection preserves in-plane distances") {
  Rng rng(11);
  const Vec3 n = Vec3(0.6, -0.8, 0);
  const Vec3 e1(-n.y(), n.x(), 0);  // in-plane horizontal
  const Vec3 e2(0, 0, 1);
  std::vector<Vec3> pts;
  for (int i = 0; i < 8; ++i)
    pts.push_back(e1 * rng.uniform(-1, 1) + e2 * rng.uniform(-1, 1));
  std::vector<int> idx(8);
  for (int i = 0; i < 8; ++i) idx[i] = i;
  const ProjectedCurve c = project_to_gripper_plane(pts, idx, n);
  for (int i = 0; i < 8; ++i)
    for (int j = i + 1; j < 8; ++j)
      CHECK((c.points[i] - c.points[j]).norm() ==
            doctest::Approx((pts[i] - pts[j]).norm()).epsilon(1e-12));
}

TEST_CASE("flexibility of collinear points is zero") {
  const ProjectedCurve c =
      make_curve({{0.0, 0.3}, {0.011, 0.3}, {0.025, 0.3}, {0.036, 0.3}, {0.05, 0.3}});
  CHECK(compute_flexibility(c, 0) == doctest::Approx(0.0).epsilon(1e-14));
  const ProjectedCurve slanted =
      make_curve({{0.0, 0.0}, {0.01, 0.02}, {0.02, 0.04}, {0.03, 0.06}});
  CHECK(compute_flexibility(slanted, 0) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("flexibility magnitude approximates circle curvature") {
  const double R = 0.5, h = 0.012;
  std::vector<Vec2> pts;
  for (int k = 0; k < 5; ++k) {
    const double phi = 0.3 * h / R + k * h / R;
    pts.emplace_back(R * std::sin(phi), R * (1.0 - std::cos(phi)));
  }
  const double f = compute_flexibility(make_curve(pts), 0);
  CHECK(std::abs(f * R - 1.0) < 0.05);
  CHECK(f > 0.0);  // sagging (y grows with x) measures positive
}

TEST_CASE("mirroring y negates flexibility") {
  Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<Vec2> pts;
    double x = 0.0;
    for (int k = 0; k < 6; ++k) {
      x += rng.uniform(0.008, 0.016);
      pts.emplace_back(x, rng.uniform(-0.05, 0.05));
    }
    const double f = compute_flexibility(make_curve(pts), 0);
    std::vector<Vec2> mirrored = pts;
    for (Vec2& p : mirrored) p.y() = -p.y();
    CHECK(compute_flexibility(make_curve(mirrored), 0) ==
          doctest::Approx(-f).epsilon(1e-12));
  }
}

TEST_CASE("uniform scaling divides flexibility") {
  Rng rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<Vec2> pts;
    double x = 0.0;
    for (int k = 0; k < 6; ++k) {
      x += rng.uniform(0.008, 0.016);
      pts.emplace_back(x, rng.uniform(-0.03, 0.03));
    }
    const double f = compute_flexibility(make_curve(pts), 0);
    const double lambda = rng.uniform(0.5, 2.0);
    std::vector<Vec2> scaled = pts;
    for (Vec2& p : scaled) p *= lambda;
    CHECK(compute_flexibility(make_curve(scaled), 0) ==
          doctest::Approx(f / lambda).epsilon(1e-9));
  }
}

TEST_CASE("flexibility is translation invariant") {
  const std::vector<Vec2> pts{{0.0, 0.01}, {0.012, 0.013}, {0.024, 0.02}, {0.036, 0.031}};
  const double f = compute_flexibility(make_curve(pts), 0);
  std::vector<Vec2> moved = pts;
  for (Vec2& p : moved) p += Vec2(1.25, -3.5);
  CHECK(compute_flexibility(make_curve(moved), 0) == doctest::Approx(f).epsilon(1e-9));
}

TEST_CASE("degenerate x spacing falls back one window then raises") {
  // first window degenerate (x0 == x1), the shifted window works
  const ProjectedCurve shifted =
      make_curve({{0.0, 0.0}, {0.0, 0.01}, {0.01, 0.02}, {0.02, 0.03}, {0.03, 0.05}, {0.04, 0.08}});
  CHECK_NOTHROW(compute_flexibility(shifted, 0));
  // every x equal: nothing to fall back to
  const ProjectedCurve vertical =
      make_curve({{0.0, 0.0}, {0.0, 0.01}, {0.0, 0.02}, {0.0, 0.03}, {0.0, 0.04}, {0.0, 0.05}});
  CHECK_THROWS_AS(compute_flexibility(vertical, 0), DegenerateGeometry);
}

TEST_CASE("point-point distance") {
  Rng rng(9);
  std::vector<Vec2> a, b;
  for (int i = 0; i < 20; ++i) {
    a.emplace_back(rng.uniform(-1, 1), rng.uniform(-1, 1));
    b.emplace_back(rng.uniform(-1, 1), rng.uniform(-1, 1));
  }
  const ProjectedCurve ca = make_curve(a), cb = make_curve(b);
  CHECK(point_point_distance(ca, ca) == 0.0);

  ProjectedCurve shifted = ca;
  for (Vec2& p : shifted.points) p.x() += 0.001;
  CHECK(point_point_distance(ca, shifted) == doctest::Approx(0.001).epsilon(1e-12));

  double brute = 0.0;
  for (int i = 0; i < 20; ++i) brute += (a[i] - b[i]).norm();
  brute /= 20.0;
  CHECK(point_point_distance(ca, cb) == doctest::Approx(brute).epsilon(1e-14));

  ProjectedCurve shorter = ca;
  shorter.points.pop_back();
  CHECK_THROWS_AS(point_point_distance(ca, shorter), ValidationError);
}

TEST_CASE("augment: degenerate draws are identity / pure scaling") {
  const ProjectedCurve c =
      make_curve({{0.01, 0.02}, {0.02, 0.05}, {0.03, 0.09}, {0.04, 0.15}});
  Rng rng(1);
  AugmentParams id{1.0, 1.0, 0.0};
  const ProjectedCurve same = augment_sample(c, rng, id);
  for (std::size_t i = 0; i < c.points.size(); ++i)
    CHECK((same.points[i] - c.points[i]).norm() == 0.0);

  AugmentParams scale_only{0.85, 0.85, 0.0};
  const ProjectedCurve scaled = augment_sample(c, rng, scale_only);
  for (std::size_t i = 0; i < c.points.size(); ++i)
    CHECK((scaled.points[i] - 0.85 * c.points[i]).norm() < 1e-15);
}

TEST_CASE("augment: empirical noise std matches the configured value") {
  const ProjectedCurve c = make_curve({{0, 0}, {0.012, 0}, {0.024, 0}, {0.036, 0}});
  Rng rng(1234);
  AugmentParams noise_only{1.0, 1.0, 0.003};
  double sum = 0.0, sum2 = 0.0;
  long count = 0;
  for (int rep = 0; rep < 12500; ++rep) {  // 12500 * 8 coordinates = 1e5 draws
    const ProjectedCurve out = augment_sample(c, rng, noise_only);
    for (std::size_t i = 0; i < c.points.size(); ++i) {
      for (int d = 0; d < 2; ++d) {
        const double delta = out.points[i][d] - c.points[i][d];
        sum += delta;
        sum2 += delta * delta;
        ++count;
      }
    }
  }
  const double var = sum2 / count - (sum / count) * (sum / count);
  CHECK(std::sqrt(var) == doctest::Approx(0.003).epsilon(0.02));
}

TEST_CASE("nearest_flex_match picks closest, ties to smaller label") {
  FlexDataset lib;
  for (double f : {1.0, 2.0, 4.0}) {
    FlexSample s;
    s.label_f = f;
    s.sweep_param = f;
    s.augmented = false;
    s.split = Split::train;
    lib.samples.push_back(s);
  }
  CHECK(nearest_flex_match(2.0, lib).label_f == 2.0);
  CHECK(nearest_flex_match(-10.0, lib).label_f == 1.0);
  CHECK(nearest_flex_match(3.0, lib).label_f == 2.0);  // midway: smaller wins
}

TEST_CASE("dataset generation: counts, ordering, determinism") {
  const std::vector<double> sweep{0.2, 0.6, 1.0};
  GenOptions opts;
  opts.rig.max_settle_steps = 1500;

  const FlexDataset none = generate_flex_dataset(sweep, 0, 77, opts);
  CHECK(none.samples.size() == 3);  // one clean sample per sweep value
  for (const FlexSample& s : none.samples) CHECK_FALSE(s.augmented);

  const FlexDataset ds = generate_flex_dataset(sweep, 10, 77, opts);
  CHECK(ds.count(Split::train, true) == 30);
  CHECK(ds.count(Split::train, false) == 3);
  CHECK(ds.count(Split::val) == 3);
  CHECK(ds.count(Split::test) == 3);
  for (const FlexSample& s : ds.samples) CHECK(s.curve.points.size() == 20);

  save_jsonl(ds, "flex_ds_a.jsonl");
  const FlexDataset again = generate_flex_dataset(sweep, 10, 77, opts);
  save_jsonl(again, "flex_ds_b.jsonl");
  CHECK(slurp("flex_ds_a.jsonl") == slurp("flex_ds_b.jsonl"));

  const FlexDataset loaded = load_jsonl("flex_ds_a.jsonl");
  CHECK(loaded.samples.size() == ds.samples.size());
  CHECK(loaded.meta.sim_params_hash == ds.meta.sim_params_hash);
  CHECK(loaded.samples[5].label_f == ds.samples[5].label_f);
  std::remove("flex_ds_a.jsonl");
  std::remove("flex_ds_a.jsonl.meta.json");
  std::remove("flex_ds_b.jsonl");
  std::remove("flex_ds_b.jsonl.meta.json");
}

TEST_CASE("stiffer rope has a smaller label") {
  const double floppy = label_flexibility(0.1);
  const double stiff = label_flexibility(1.0);
  CHECK(stiff <= floppy);
  CHECK(stiff < 10.0);
  CHECK(floppy > 50.0);
}

TEST_CASE("labels fall monotonically across the sweep") {
  std::vector<double> sweep, labels;
  for (int i = 0; i < 12; ++i) {
    const double s = 0.05 + 0.95 * i / 11.0;
    sweep.push_back(s);
    labels.push_back(label_flexibility(s));
  }
  CHECK(spearman_rho(sweep, labels) <= -0.9);
}

}  // TEST_SUITE
