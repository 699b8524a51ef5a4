#include "lingtree/fixtures.hpp"

#include "lingtree/errors.hpp"

namespace lingtree {
namespace {

constexpr int kFixtureSize = 8;
constexpr int kFixtureYears[kFixtureSize] = {1836, 1838, 1843, 1847, 1852, 1854, 1859, 1861};

// 100 shared words.
constexpr double kTable55[kFixtureSize][kFixtureSize] = {
    {0.000, 0.375, 0.405, 0.299, 0.286, 0.294, 0.326, 0.348},
    {0.375, 0.000, 0.414, 0.318, 0.329, 0.356, 0.345, 0.379},
    {0.405, 0.414, 0.000, 0.443, 0.348, 0.313, 0.360, 0.346},
    {0.299, 0.318, 0.443, 0.000, 0.298, 0.316, 0.344, 0.375},
    {0.286, 0.329, 0.348, 0.298, 0.000, 0.240, 0.223, 0.299},
    {0.294, 0.356, 0.313, 0.316, 0.240, 0.000, 0.214, 0.224},
    {0.326, 0.345, 0.360, 0.344, 0.223, 0.214, 0.000, 0.256},
    {0.348, 0.379, 0.346, 0.375, 0.299, 0.224, 0.256, 0.000},
};

// 10 shared words. (1836, 1859) is published as 0.321 in one triangle and
// 0.322 in the other.
constexpr double kTable56[kFixtureSize][kFixtureSize] = {
    {0.000, 0.373, 0.374, 0.303, 0.291, 0.292, 0.321, 0.344},
    {0.373, 0.000, 0.400, 0.320, 0.326, 0.352, 0.340, 0.373},
    {0.374, 0.400, 0.000, 0.429, 0.315, 0.282, 0.341, 0.318},
    {0.303, 0.320, 0.429, 0.000, 0.309, 0.331, 0.351, 0.381},
    {0.291, 0.326, 0.315, 0.309, 0.000, 0.245, 0.220, 0.296},
    {0.292, 0.352, 0.282, 0.331, 0.245, 0.000, 0.206, 0.221},
    {0.322, 0.340, 0.341, 0.351, 0.220, 0.206, 0.000, 0.249},
    {0.344, 0.373, 0.318, 0.381, 0.296, 0.221, 0.249, 0.000},
};

DistanceMatrix build(const double (&values)[kFixtureSize][kFixtureSize]) {
  DistanceMatrix m;
  m.d.resize(kFixtureSize, kFixtureSize);
  for (int i = 0; i < kFixtureSize; ++i) {
    m.labels.push_back(std::to_string(kFixtureYears[i]));
    m.years.push_back(kFixtureYears[i]);
    for (int j = 0; j < kFixtureSize; ++j) m.d(i, j) = values[i][j];
  }
  return m;
}

}  // namespace

DistanceMatrix fixture_matrix(std::string_view table_id) {
  if (table_id == "5-5") return build(kTable55);
  if (table_id == "5-6") return build(kTable56);
  throw data_error("unknown fixture id '" + std::string(table_id) + "' (expected 5-5 or 5-6)");
}

std::vector<std::string> fixture_ids() { return {"5-5", "5-6"}; }

}  // namespace lingtree
