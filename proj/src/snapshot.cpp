#include "sscl/snapshot.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace sscl::io {

namespace {

static_assert(std::endian::native == std::endian::little,
              "snapshot format assumes a little-endian host");

template <typename T>
void put(std::ofstream& os, T v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::ifstream& is) {
    T v{};
    is.read(reinterpret_cast<char*>(&v), sizeof(T));
    return v;
}

}  // namespace

void write_snapshot(const std::string& path, const FieldSnapshot& snap) {
    if (snap.payload.size() != static_cast<size_t>(snap.n1) * snap.n2)
        throw std::invalid_argument("snapshot: payload length does not match header");
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("snapshot: cannot open '" + path + "' for writing");
    os.write("SSCL", 4);
    put(os, snap.version);
    put(os, snap.dim);
    put(os, snap.n1);
    put(os, snap.n2);
    put(os, snap.time);
    put(os, snap.dtype);
    os.write(reinterpret_cast<const char*>(snap.payload.data()),
             static_cast<std::streamsize>(snap.payload.size() * sizeof(double)));
    if (!os) throw std::runtime_error("snapshot: short write to '" + path + "'");
}

FieldSnapshot read_snapshot(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("snapshot: cannot open '" + path + "'");
    char magic[4];
    is.read(magic, 4);
    if (!is || std::memcmp(magic, "SSCL", 4) != 0)
        throw std::runtime_error("snapshot: bad magic in '" + path + "'");
    FieldSnapshot s;
    s.version = get<std::uint16_t>(is);
    s.dim = get<std::uint16_t>(is);
    s.n1 = get<std::uint32_t>(is);
    s.n2 = get<std::uint32_t>(is);
    s.time = get<double>(is);
    s.dtype = get<std::uint16_t>(is);
    if (s.version != 1 || s.dtype != 1)
        throw std::runtime_error("snapshot: unsupported version/dtype in '" + path + "'");
    s.payload.resize(static_cast<size_t>(s.n1) * s.n2);
    is.read(reinterpret_cast<char*>(s.payload.data()),
            static_cast<std::streamsize>(s.payload.size() * sizeof(double)));
    if (!is) throw std::runtime_error("snapshot: truncated payload in '" + path + "'");
    return s;
}

}  // namespace sscl::io
