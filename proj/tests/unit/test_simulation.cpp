#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "annoloop/error.hpp"
#include "annoloop/simulation.hpp"
#include "cli/synthetic.hpp"
#include "support/reference.hpp"

using namespace annoloop;

namespace {

Dataset uniform_dataset(std::size_t images, int objects_per_image, std::uint64_t seed = 0) {
  cli::SyntheticSpec spec;
  spec.images_per_cluster = images / 2;
  spec.min_objects = objects_per_image;
  spec.max_objects = objects_per_image;
  spec.seed = seed;
  return cli::make_synthetic(spec).dataset;
}

BatchPlan plan_of(const Dataset& ds, std::size_t n) {
  Ordering o;
  o.ids = ds.ids();
  return split_batches(o, n);
}

DetectorOracle of_kind(OracleKind k) {
  DetectorOracle o;
  o.kind = k;
  return o;
}

}  // namespace

TEST_CASE("correction examples") {
  const std::vector<ObjectLabel> gt{{"a", {0, 0, 4, 4}}, {"a", {5, 5, 9, 9}}, {"b", {0, 5, 4, 9}},
                                    {"b", {5, 0, 9, 4}}, {"a", {10, 10, 12, 12}}};
  std::vector<Prediction> same;
  std::vector<Prediction> doubled;
  for (const auto& o : gt) {
    same.push_back({o.class_name, o.bbox, 1.0});
    doubled.push_back({o.class_name, o.bbox, 1.0});
    doubled.push_back({o.class_name, o.bbox, 1.0});
  }
  CHECK(simulate_correction(same, gt, 0.5) == CorrectionStats{0, 0, 5});
  CHECK(simulate_correction({}, gt, 0.5) == CorrectionStats{5, 0, 0});
  CHECK(simulate_correction(doubled, gt, 0.5) == CorrectionStats{0, 5, 5});
  CHECK_THROWS_AS(simulate_correction(same, gt, 1.0), ConfigError);
}

TEST_CASE("workload formulas") {
  CHECK(workload_boxes(10, 5, 4) == 19);
  CHECK(workload_time(10, 5, 4, 10.0) == 170.0);
  CHECK(workload_time(10, 5, 0, 3.5) == 15 * 3.5);
  CHECK(workload_time(0, 0, 0, 10.0) == 0.0);
  CHECK_THROWS_AS(workload_time(1, 1, 1, 0.0), ConfigError);
  CHECK(reduction_percent(300, 300) == 0.0);
  CHECK(reduction_percent(30, 300) == 90.0);
  CHECK(reduction_percent(0.2 * 1500.0, 1500.0) == 80.0);
  CHECK(reduction_percent(400, 300) < 0.0);
  CHECK_THROWS_AS(reduction_percent(1, 0), ConfigError);
}

TEST_CASE("property: workload formulas match the spreadsheet recomputation") {
  std::mt19937_64 rng(41);
  for (int i = 0; i < 500; ++i) {
    const std::uint64_t b = rng() % 100000, a = rng() % 100000, r = rng() % 100000;
    const double t = testing::uniform(rng, 0.1, 100.0);
    CHECK(workload_boxes(b, a, r) == testing::spreadsheet_wb(b, a, r));
    const long double ref = testing::spreadsheet_wt(b, a, r, t);
    CHECK(std::abs(workload_time(b, a, r, t) - static_cast<double>(ref)) <= 1e-9 * static_cast<double>(ref) + 1e-12);
  }
}

TEST_CASE("perfect oracle with ten equal batches reduces the workload by 90%") {
  const auto ds = uniform_dataset(100, 3);
  REQUIRE(ds.total_objects() == 300);
  const auto rep = run_loop(plan_of(ds, 10), ds, of_kind(OracleKind::perfect), 0.5);
  CHECK(rep.totals.b1n == 30);
  CHECK(rep.totals.wb == 30);
  CHECK(rep.totals.reduction_b_pct == 90.0);
  CHECK(rep.totals.reduction_t_pct == 90.0);
}

TEST_CASE("null oracle never reduces the workload") {
  const auto ds = uniform_dataset(40, 2, 3);
  for (std::size_t n : {1u, 3u, 7u, 40u}) {
    const auto rep = run_loop(plan_of(ds, n), ds, of_kind(OracleKind::null), 0.5);
    CHECK(rep.totals.wb == ds.total_objects());
    CHECK(rep.totals.reduction_b_pct == 0.0);
    CHECK(rep.totals.reduction_t_pct == 0.0);
  }
}

TEST_CASE("single batch is fully manual whatever the oracle") {
  const auto ds = uniform_dataset(20, 2);
  const auto rep = run_loop(plan_of(ds, 1), ds, of_kind(OracleKind::perfect), 0.5);
  REQUIRE(rep.rows.size() == 1);
  CHECK(rep.totals.wb == ds.total_objects());
  CHECK(rep.totals.reduction_b_pct == 0.0);
  CHECK(rep.totals.reduction_t_pct == 0.0);
}

TEST_CASE("duplicating oracle removes one copy per later gt") {
  const auto ds = uniform_dataset(100, 3);
  const auto plan = plan_of(ds, 10);
  const auto rep = run_loop(plan, ds, of_kind(OracleKind::duplicating), 0.5, 10.0);
  CHECK(rep.totals.removals == 270);
  CHECK(rep.totals.additions == 0);
  CHECK(rep.totals.wt_s == 30 * 10.0 + 270 * 5.0);
}

TEST_CASE("property: per-image conservation and totals equal the row sums") {
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 15; ++trial) {
    cli::SyntheticSpec spec;
    spec.images_per_cluster = 5 + rng() % 20;
    spec.seed = rng();
    const auto ds = cli::make_synthetic(spec).dataset;
    DetectorOracle o = of_kind(trial % 2 ? OracleKind::noisy : OracleKind::learning);
    o.p_detect = testing::uniform(rng, 0, 1);
    o.jitter = testing::uniform(rng, 0, 0.3);
    o.fp_rate = testing::uniform(rng, 0, 2);
    o.rng_seed = rng();
    const std::size_t n = 1 + rng() % 8;
    const double t = testing::uniform(rng, 0.2, 0.9);
    const double secs = testing::uniform(rng, 1, 20);
    const auto rep = run_loop(plan_of(ds, n), ds, o, t, secs, 1 + trial % 3);

    std::uint64_t a = 0, r = 0, labeled = 0;
    for (const auto& row : rep.rows) {
      CHECK(row.matched + row.additions == row.gt_objects);
      CHECK(row.matched + row.removals == row.predictions);
      labeled += row.gt_objects;
      CHECK(row.labeled_objects_cum == labeled);
      if (row.iter > 1) {
        a += row.additions;
        r += row.removals;
      }
      CHECK(row.wb_cum == workload_boxes(rep.rows.front().gt_objects, a, r));
      CHECK(row.wt_cum_s == workload_time(rep.rows.front().gt_objects, a, r, secs));
    }
    CHECK(rep.totals.additions == a);
    CHECK(rep.totals.removals == r);
    CHECK(rep.totals.wb == rep.rows.back().wb_cum);
    CHECK(rep.totals.wt_s == rep.rows.back().wt_cum_s);
    CHECK(rep.totals.total_objects == ds.total_objects());
    CHECK(rep.totals.wb_full == ds.total_objects());
    CHECK(rep.totals.wt_full_s == static_cast<double>(ds.total_objects()) * secs);
  }
}

TEST_CASE("thread count does not change the report") {
  const auto ds = uniform_dataset(120, 3, 5);
  auto o = of_kind(OracleKind::learning);
  o.rng_seed = 8;
  const auto plan = plan_of(ds, 6);
  const auto one = run_loop(plan, ds, o, 0.5, 10.0, 1);
  const auto many = run_loop(plan, ds, o, 0.5, 10.0, 4);
  CHECK(one.rows == many.rows);
  CHECK(one.totals == many.totals);
}

TEST_CASE("permuting images within a batch leaves A and R unchanged") {
  const auto ds = uniform_dataset(60, 2, 9);
  auto o = of_kind(OracleKind::noisy);
  o.p_detect = 0.6;
  o.fp_rate = 1.0;
  o.rng_seed = 4;
  auto plan = plan_of(ds, 4);
  const auto base = run_loop(plan, ds, o, 0.5);
  std::mt19937_64 rng(43);
  for (auto& b : plan.batches) std::shuffle(b.begin(), b.end(), rng);
  const auto shuffled = run_loop(plan, ds, o, 0.5);
  CHECK(shuffled.totals == base.totals);
}

TEST_CASE("expected W_B is non-increasing in detection probability") {
  const auto ds = uniform_dataset(60, 2, 1);
  const auto plan = plan_of(ds, 5);
  std::vector<double> means;
  std::vector<double> ses;
  for (double pd : {0.0, 0.5, 1.0}) {
    std::vector<double> wb;
    for (std::uint64_t s = 0; s < 20; ++s) {
      auto o = of_kind(OracleKind::noisy);
      o.p_detect = pd;
      o.jitter = 0.0;
      o.class_flip = 0.0;
      o.fp_rate = 0.0;
      o.rng_seed = s;
      wb.push_back(static_cast<double>(run_loop(plan, ds, o, 0.5).totals.wb));
    }
    const double mean = std::accumulate(wb.begin(), wb.end(), 0.0) / wb.size();
    double ss = 0.0;
    for (double v : wb) ss += (v - mean) * (v - mean);
    means.push_back(mean);
    ses.push_back(std::sqrt(ss / (wb.size() - 1)) / std::sqrt(static_cast<double>(wb.size())));
  }
  for (std::size_t i = 0; i + 1 < means.size(); ++i) {
    CHECK(means[i + 1] <= means[i] + std::max(ses[i], ses[i + 1]));
  }
  CHECK(means.back() == static_cast<double>(ds.total_objects()) / 5.0);
}

TEST_CASE("boxes jittered past the threshold cost one removal and one addition each") {
  const auto ds = uniform_dataset(40, 3, 2);
  const auto plan = plan_of(ds, 4);
  auto o = of_kind(OracleKind::noisy);
  o.p_detect = 1.0;
  o.class_flip = 1.0;  // a wrong-class proposal can never match
  o.jitter = 0.5;
  o.rng_seed = 6;
  const auto rep = run_loop(plan, ds, o, 0.5);
  std::uint64_t later_gt = 0;
  std::uint64_t later_pred = 0;
  for (const auto& row : rep.rows) {
    if (row.iter == 1) continue;
    later_gt += row.gt_objects;
    later_pred += row.predictions;
  }
  CHECK(rep.totals.wb == rep.totals.b1n + later_gt + later_pred);
}

TEST_CASE("run_loop input errors") {
  const auto ds = uniform_dataset(10, 1);
  const auto oracle = of_kind(OracleKind::perfect);
  CHECK_THROWS_AS(run_loop(BatchPlan{}, ds, oracle, 0.5), DataError);
  auto plan = plan_of(ds, 2);
  plan.batches.push_back({});
  CHECK_THROWS_AS(run_loop(plan, ds, oracle, 0.5), DataError);
  auto partial = plan_of(ds, 2);
  partial.batches.back().pop_back();
  CHECK_THROWS_AS(run_loop(partial, ds, oracle, 0.5), DataError);
  const Dataset empty_objects(std::vector<ImageRecord>{{"a", {}, 4, 4, {}}});
  CHECK_THROWS_AS(run_loop(plan_of(empty_objects, 1), empty_objects, oracle, 0.5), DataError);
}
