#pragma once

#include <string>
#include <vector>

#include "pada/pipeline.hpp"

namespace pada {

// On-disk model: manifest.json plus one little-endian float64 column-major
// sidecar file per array, each checksummed in the manifest. Writing the
// same model twice yields byte-identical files, and a read-rewrite cycle
// reproduces every byte.
struct ModelBundle {
  FitModel model;
  std::vector<long> curve_ids;  // empty means 1..J
};

void write_model_bundle(const std::string& dir, const ModelBundle& bundle);
ModelBundle read_model_bundle(const std::string& dir);

// FNV-1a 64-bit digest as 16 lowercase hex digits
std::string fnv1a64_hex(const unsigned char* p, size_t n);

}  // namespace pada
