#pragma once

#include <string>
#include <vector>

#include "pada/dataset.hpp"

namespace pada {

// Curve panel parsed from a `curve_id,time,value` file. Ids are positive
// integers in any row order; ascending id defines the series index. Ids
// absent inside the [min,max] id range surface in gap_ids so the caller can
// warn that those curves were skipped.
struct CurveCsv {
  FtsDataset data;
  std::vector<long> curve_ids;  // ascending, one per curve
  std::vector<long> gap_ids;
};

CurveCsv read_curve_csv(const std::string& path);

// Writes the same schema; ids must match the curve count (empty means 1..J).
void write_curve_csv(const std::string& path, const FtsDataset& data,
                     const std::vector<long>& curve_ids = {});

}  // namespace pada
