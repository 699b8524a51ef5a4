#pragma once

#include <string_view>
#include <vector>

#include "lingtree/geometry.hpp"

namespace lingtree {

// Bundled reference distance matrices over eight corpora labeled by year
// (1836..1861): id "5-5" was computed with 100 shared words, id "5-6"
// with 10. Values are returned exactly as published; "5-6" contains one
// asymmetric pair, an artifact of its 3-decimal rounding.
DistanceMatrix fixture_matrix(std::string_view table_id);

std::vector<std::string> fixture_ids();

}  // namespace lingtree
