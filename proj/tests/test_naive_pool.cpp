#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "sroc/error.hpp"
#include "sroc/lehmann_phm.hpp"
#include "sroc/naive_pool.hpp"
#include "sroc/random.hpp"

using namespace sroc;

namespace {

ReaderRecord reader(std::string id, double se, double sp, double n) {
  return {std::move(id), std::nullopt, {se * n / 2, (1 - sp) * n / 2, (1 - se) * n / 2, sp * n / 2}};
}

}  // namespace

TEST_CASE("pooled point") {
  const std::vector<ReaderRecord> rs{reader("a", 0.6, 0.9, 100), reader("b", 0.8, 0.7, 300)};
  const auto u = pooled_point(rs, Weighting::Unweighted);
  CHECK(u.mean_se == doctest::Approx(0.7));
  CHECK(u.mean_sp == doctest::Approx(0.8));
  CHECK(u.n_readers == 2);
  const auto w = pooled_point(rs, Weighting::CaseWeighted);
  CHECK(w.mean_se == doctest::Approx(0.75));
  CHECK(w.mean_sp == doctest::Approx(0.75));

  const auto single = pooled_point(std::span(rs).first(1), Weighting::Unweighted);
  CHECK(single.mean_se == doctest::Approx(0.6));
  CHECK(single.mean_sp == doctest::Approx(0.9));
  CHECK_THROWS_AS(pooled_point({}, Weighting::Unweighted), Error);
}

TEST_CASE("pooled scalars") {
  const std::vector<ReaderRecord> one{{"r", std::nullopt, {40, 5, 10, 45}}};
  CHECK(pooled_scalar(one, ScalarMetric::F1) == doctest::Approx(0.8421052631578947).epsilon(1e-12));
  CHECK(pooled_scalar(one, ScalarMetric::Accuracy) == doctest::Approx(0.85));
  CHECK(pooled_scalar(one, ScalarMetric::Ppv) == doctest::Approx(40.0 / 45.0));
  CHECK(pooled_scalar(one, ScalarMetric::Npv) == doctest::Approx(45.0 / 55.0));

  const std::vector<ReaderRecord> youden{reader("a", 0.8, 0.7, 100), reader("b", 0.6, 0.9, 100)};
  CHECK(pooled_scalar(youden, ScalarMetric::Youden) == doctest::Approx(0.5));

  const std::vector<ReaderRecord> bad{{"ok", std::nullopt, {4, 1, 1, 4}}, {"never-positive", std::nullopt, {0, 0, 5, 5}}};
  try {
    pooled_scalar(bad, ScalarMetric::Ppv);
    FAIL("expected undefined metric");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::UndefinedMetric);
    CHECK(std::string(e.what()).find("never-positive") != std::string::npos);
  }
}

TEST_CASE("pooling properties over random reader sets") {
  CounterRng rng(3, 3);
  for (int rep = 0; rep < 100; ++rep) {
    std::vector<ReaderRecord> rs;
    const int k = 1 + static_cast<int>(rng.below(12));
    for (int i = 0; i < k; ++i) {
      rs.push_back({"r" + std::to_string(i), std::nullopt,
                    {double(1 + rng.below(50)), double(1 + rng.below(50)), double(1 + rng.below(50)),
                     double(1 + rng.below(50))}});
    }
    const auto base = pooled_point(rs, Weighting::Unweighted);
    auto shuffled = rs;
    std::reverse(shuffled.begin(), shuffled.end());
    std::rotate(shuffled.begin(), shuffled.begin() + static_cast<long>(rng.below(shuffled.size())), shuffled.end());
    const auto perm = pooled_point(shuffled, Weighting::Unweighted);
    CHECK(perm.mean_se == doctest::Approx(base.mean_se).epsilon(1e-13));
    CHECK(perm.mean_sp == doctest::Approx(base.mean_sp).epsilon(1e-13));
    CHECK(pooled_scalar(rs, ScalarMetric::Youden) == doctest::Approx(base.mean_se + base.mean_sp - 1.0).epsilon(1e-12));

    // Equal case counts: weighting is a no-op.
    std::vector<ReaderRecord> equal;
    for (const auto& r : rs) equal.push_back(reader(r.reader_id, sensitivity(r.table), specificity(r.table), 80));
    const auto eu = pooled_point(equal, Weighting::Unweighted);
    const auto ew = pooled_point(equal, Weighting::CaseWeighted);
    CHECK(ew.mean_se == doctest::Approx(eu.mean_se).epsilon(1e-12));
    CHECK(ew.mean_sp == doctest::Approx(eu.mean_sp).epsilon(1e-12));
  }
}

TEST_CASE("readers on a concave Lehmann curve pool strictly below it") {
  CounterRng rng(17, 5);
  for (int rep = 0; rep < 100; ++rep) {
    const double theta = 0.05 + 0.85 * rng.uniform();
    const int k = 2 + static_cast<int>(rng.below(8));
    std::vector<ReaderRecord> rs;
    for (int i = 0; i < k; ++i) {
      const double fpr = 0.02 + 0.9 * (i + rng.uniform()) / k;
      rs.push_back(reader("r" + std::to_string(i), std::pow(fpr, theta), 1 - fpr, 1000));
    }
    const auto p = pooled_point(rs, Weighting::Unweighted);
    CHECK(p.mean_se < std::pow(p.mean_fpr(), theta));
  }
  const std::vector<ReaderRecord> two{reader("a", 0.2, 0.96, 1000), reader("b", 0.8, 0.36, 1000)};
  const auto p = pooled_point(two, Weighting::Unweighted);
  CHECK(p.mean_fpr() == doctest::Approx(0.34));
  CHECK(std::sqrt(0.34) - p.mean_se == doctest::Approx(0.0830951894845300).epsilon(1e-9));
}

TEST_CASE("beat count") {
  const auto curve = sroc_curve(0.5, 2001);
  std::vector<RocPoint> on;
  for (double f : {0.1, 0.3, 0.7}) on.push_back({f, interpolate_curve(curve, f)});
  CHECK(beat_count(std::span<const RocPoint>(on), curve) == 0);
  const std::vector<RocPoint> below{{0.34, 0.5}};
  CHECK(beat_count(std::span<const RocPoint>(below), curve) == 1);
  CHECK(beat_count(std::span<const RocPoint>(), curve) == 0);
  CHECK(interpolate_curve(curve, 0.34) == doctest::Approx(std::sqrt(0.34)).epsilon(1e-5));

  const std::vector<ReaderRecord> rs{reader("a", 0.5, 0.66, 100), reader("b", 0.95, 0.66, 100)};
  CHECK(beat_count(std::span<const ReaderRecord>(rs), curve) == 1);

  const std::vector<RocPoint> unordered{{0.5, 0.5}, {0.4, 0.6}};
  CHECK_THROWS_AS(beat_count(std::span<const RocPoint>(below), unordered), Error);
}
