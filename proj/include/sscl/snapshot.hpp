// Binary field snapshots: magic "SSCL", little-endian header, f64 payload.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace sscl::io {

struct FieldSnapshot {
    std::uint16_t version = 1;
    std::uint16_t dim = 1;
    std::uint32_t n1 = 0;
    std::uint32_t n2 = 1;
    double time = 0.0;
    std::uint16_t dtype = 1;  // 1 = f64 little-endian
    std::vector<double> payload;  // row-major, length n1*n2
};

void write_snapshot(const std::string& path, const FieldSnapshot& snap);
FieldSnapshot read_snapshot(const std::string& path);

}  // namespace sscl::io
