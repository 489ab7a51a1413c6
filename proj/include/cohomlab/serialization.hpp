#pragma once

#include <filesystem>
#include <string>

#include "cohomlab/function_space.hpp"

namespace cohomlab {

// Binary container: u32 dims, then per axis f64 lo, f64 hi, u32 n, f64 offset,
// u8 weight, then interleaved re/im f64 values in row-major order. All
// little-endian.
std::string encode_binary(const SampledFunction& f);
SampledFunction decode_binary(const std::string& bytes);

// JSON text mirroring the binary header.
std::string header_json(const SampledFunction& f);

// Writes <path> (binary) and <path>.json (sidecar).
void save_function(const SampledFunction& f, const std::filesystem::path& path);
// Reads the binary file and, when the sidecar exists, checks it agrees.
SampledFunction load_function(const std::filesystem::path& path);

}  // namespace cohomlab
